//! Random generators for property tests and acceptance runs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::arith::field::PrimeField;
use crate::arith::multi_index::MultiIndex;
use crate::arith::poly::{Poly, Vars};
use crate::diffop::DiffOperator;
use crate::linalg::matrix::PolyMatrix;
use crate::tower::{Mode, Tower};

pub fn random_element<F: PrimeField, R: Rng>(rng: &mut R) -> F {
    F::from_u64(rng.gen_range(0..F::CHARACTERISTIC as u64))
}

pub fn random_nonzero<F: PrimeField, R: Rng>(rng: &mut R) -> F {
    F::from_u64(rng.gen_range(1..F::CHARACTERISTIC as u64))
}

/// Each monomial of degree at most `max_degree` is kept with probability
/// `density` and given a random coefficient.
pub fn random_poly<F: PrimeField, R: Rng>(rng: &mut R, vars: &Vars, max_degree: u32, density: f64) -> Poly<F> {
    let mut terms = Vec::new();
    for m in MultiIndex::up_to_degree(vars.len(), max_degree) {
        if rng.gen_bool(density) {
            terms.push((m, random_element::<F, R>(rng)));
        }
    }
    Poly::from_terms(vars, terms)
}

/// Random operator with terms of order at most `max_order`.
pub fn random_operator<F: PrimeField, R: Rng>(
    rng: &mut R,
    vars: &Vars,
    active: &[usize],
    max_order: u32,
    max_degree: u32,
) -> DiffOperator<F> {
    let mut op = DiffOperator::zero(vars, active);
    for n in MultiIndex::up_to_degree(active.len(), max_order) {
        if rng.gen_bool(0.4) {
            let a = random_poly(rng, vars, max_degree, 0.3);
            op = op.checked_add(&DiffOperator::term(a, active, n)).unwrap();
        }
    }
    op
}

fn elementary<F: PrimeField, R: Rng>(rng: &mut R, vars: &Vars, rank: usize, max_degree: u32) -> PolyMatrix<F> {
    let mut m = PolyMatrix::identity(vars, rank);
    if rank < 2 {
        return m;
    }
    let i = rng.gen_range(0..rank);
    let mut j = rng.gen_range(0..rank - 1);
    if j >= i {
        j += 1;
    }
    m.set(i, j, random_poly(rng, vars, max_degree, 0.6));
    m
}

/// A product of elementary and constant diagonal matrices, kept only when
/// every entry has degree at most `max_degree`; the determinant is a nonzero
/// constant by construction.
pub fn random_unit_matrix<F: PrimeField, R: Rng>(
    rng: &mut R,
    vars: &Vars,
    rank: usize,
    max_degree: u32,
) -> PolyMatrix<F> {
    loop {
        let mut m = PolyMatrix::identity(vars, rank);
        for i in 0..rank {
            m.set(i, i, Poly::constant(vars, random_nonzero(rng)));
        }
        let mut perm: Vec<usize> = (0..rank).collect();
        perm.shuffle(rng);
        m = m.submatrix(&perm, &(0..rank).collect::<Vec<_>>());
        for _ in 0..rng.gen_range(1..=3) {
            m = m.checked_mul(&elementary(rng, vars, rank, max_degree)).unwrap();
        }
        if m.max_degree().unwrap_or(0) <= max_degree {
            return m;
        }
    }
}

pub fn random_tower<F: PrimeField, R: Rng>(
    rng: &mut R,
    fiber_vars: &[&str],
    base_vars: &[&str],
    mode: Mode,
    rank: usize,
    length: usize,
    max_degree: u32,
) -> Tower<F> {
    let fiber: Vec<String> = fiber_vars.iter().map(|s| s.to_string()).collect();
    let base: Vec<String> = base_vars.iter().map(|s| s.to_string()).collect();
    let vars: Vars = fiber.iter().chain(&base).cloned().collect::<Vec<_>>().into();
    let sigmas = (0..length).map(|_| random_unit_matrix(rng, &vars, rank, max_degree)).collect();
    Tower::new(fiber, base, mode, rank, sigmas).expect("random sigmas are valid")
}
