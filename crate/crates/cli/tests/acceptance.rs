//! Acceptance suite: one line per criterion, then a hard assertion that
//! every criterion passed. Oracles here are written independently of the
//! library code they check (own binomials, own elimination, own gcd).

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strat_core::connection::frame_equivalence;
use strat_core::gaussmanin::{
    base_change_check, external_product, gm_pushforward, maximal_pullback_sub, pullback, relative_h0, tau_action,
    tau_action_lifted, RelativeSplit,
};
use strat_core::testkit::{random_operator, random_poly, random_tower, random_unit_matrix};
use strat_core::{
    descend_tower, gauge_equivalent, lucas_binomial, vars_from, Connection, DiffOperator, Frame, Mode, MultiIndex,
    Poly, PolyMatrix, PrimeField, Tower, F2, F3, F5, F7,
};

// ---------------------------------------------------------------------------
// Independent F_p helpers over plain residues.

fn inv(a: u64, p: u64) -> u64 {
    let (mut r, mut b, mut e) = (1u64, a % p, p - 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Rank of a set of sparse vectors over F_p.
type Sparse = BTreeMap<(usize, u32), u64>;

fn rank_mod(vectors: &[Sparse], p: u64) -> usize {
    let mut pivots: Vec<((usize, u32), Sparse)> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        for (key, row) in &pivots {
            if let Some(&c) = v.get(key) {
                for (k, x) in row {
                    let e = v.entry(*k).or_insert(0);
                    *e = (*e + p - c * x % p) % p;
                }
                v.retain(|_, x| *x != 0);
            }
        }
        if let Some((&key, &lead)) = v.iter().next() {
            let s = inv(lead, p);
            let row: BTreeMap<_, _> = v.iter().map(|(k, x)| (*k, x * s % p)).collect();
            pivots.push((key, row));
        }
    }
    pivots.len()
}

/// Kernel of a column matrix (columns are sparse vectors) over F_p.
fn kernel_mod(columns: &[BTreeMap<(usize, u32, u32), u64>], p: u64) -> Vec<Vec<u64>> {
    let mut rows: BTreeMap<(usize, u32, u32), Vec<u64>> = BTreeMap::new();
    for (j, c) in columns.iter().enumerate() {
        for (k, x) in c {
            rows.entry(*k).or_insert_with(|| vec![0; columns.len()])[j] = *x;
        }
    }
    let mut m: Vec<Vec<u64>> = rows.into_values().collect();
    let n = columns.len();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(i) = (r..m.len()).find(|&i| m[i][col] != 0) else { continue };
        m.swap(r, i);
        let s = inv(m[r][col], p);
        for x in m[r].iter_mut() {
            *x = *x * s % p;
        }
        for i in 0..m.len() {
            if i != r && m[i][col] != 0 {
                let f = m[i][col];
                let pivot = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y % p) % p;
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0; n];
            v[f] = 1;
            for (row, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (p - m[row][f]) % p;
            }
            v
        })
        .collect()
}

/// Coefficients of a polynomial in `x`, ignoring every other variable
/// (callers only pass polynomials with no other variable present).
fn univariate<F: PrimeField>(f: &Poly<F>, x: usize) -> Vec<u64> {
    let mut out = Vec::new();
    for (e, c) in f.terms() {
        let d = e.as_slice()[x] as usize;
        if out.len() <= d {
            out.resize(d + 1, 0);
        }
        out[d] = c.residue() as u64;
    }
    out
}

fn uni_trim(mut a: Vec<u64>) -> Vec<u64> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn uni_gcd(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut a, mut b) = (uni_trim(a), uni_trim(b));
    while !b.is_empty() {
        let lead = inv(*b.last().unwrap(), p);
        while a.len() >= b.len() && !a.is_empty() {
            let f = a.last().unwrap() * lead % p;
            let shift = a.len() - b.len();
            for (i, x) in b.iter().enumerate() {
                a[i + shift] = (a[i + shift] + p * p - f * x % p) % p;
            }
            a = uni_trim(a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a
}

fn vector_coords<F: PrimeField>(v: &[Poly<F>], x: usize) -> BTreeMap<(usize, u32), u64> {
    let mut out = BTreeMap::new();
    for (j, e) in v.iter().enumerate() {
        for (d, c) in univariate(e, x).into_iter().enumerate() {
            if c != 0 {
                out.insert((j, d as u32), c);
            }
        }
    }
    out
}

fn rows(m: &[&[&str]]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect()
}

// ---------------------------------------------------------------------------
// 1. Operator algebra.

fn homomorphism_case<F: PrimeField>(rng: &mut ChaCha8Rng) {
    let nv = rng.gen_range(1..=2);
    let vars = vars_from(&["x", "y"][..nv]);
    let active: Vec<usize> = (0..nv).collect();
    let a = random_operator::<F, _>(rng, &vars, &active, 4, 5);
    let b = random_operator::<F, _>(rng, &vars, &active, 4, 5);
    let f = random_poly::<F, _>(rng, &vars, 5, 0.4);
    let lhs = a.compose(&b).unwrap().apply(&f).unwrap();
    let rhs = a.apply(&b.apply(&f).unwrap()).unwrap();
    assert_eq!(lhs, rhs, "apply(compose(a, b), f) differs for a = {a:?}, b = {b:?}, f = {f}");
}

fn basis_laws<F: PrimeField>() -> usize {
    let vars = vars_from(&["x", "y"]);
    let act = [0, 1];
    let mut checks = 0;
    let idx = MultiIndex::up_to_degree(2, 4);
    for m in &idx {
        for n in &idx {
            let dm = DiffOperator::<F>::basis(&vars, &act, m.clone());
            let dn = DiffOperator::<F>::basis(&vars, &act, n.clone());
            let mn = dm.compose(&dn).unwrap();
            assert_eq!(mn, dn.compose(&dm).unwrap());
            let sum = MultiIndex::new(m.as_slice().iter().zip(n.as_slice()).map(|(a, b)| a + b).collect());
            let c: u64 = m
                .as_slice()
                .iter()
                .zip(n.as_slice())
                .map(|(&a, &b)| binomial_big(a + b, b))
                .fold(BigUint::from(1u32), |acc, x| acc * x)
                .iter_u64_digits()
                .next()
                .unwrap_or(0);
            let expect = DiffOperator::<F>::basis(&vars, &act, sum).scale(F::from_u64(c));
            assert_eq!(mn, expect, "D_m D_n for m = {m:?}, n = {n:?}");
            checks += 1;
        }
        for a in 0..2 {
            let t = Poly::var(&vars, ["x", "y"][a]).unwrap();
            let lhs = DiffOperator::<F>::basis(&vars, &act, m.clone()).commutator_with_mult(&t).unwrap();
            let expect = match m.checked_sub(&MultiIndex::axis(2, a, 1)) {
                Some(k) => DiffOperator::basis(&vars, &act, k),
                None => DiffOperator::zero(&vars, &act),
            };
            for e in MultiIndex::up_to_degree(2, 6) {
                let f = Poly::<F>::monomial(&vars, e, F::one());
                assert_eq!(lhs.apply(&f).unwrap(), expect.apply(&f).unwrap());
                checks += 1;
            }
        }
    }
    checks
}

fn criterion_1() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases = 600;
    for i in 0..cases {
        match i % 3 {
            0 => homomorphism_case::<F2>(&mut rng),
            1 => homomorphism_case::<F3>(&mut rng),
            _ => homomorphism_case::<F5>(&mut rng),
        }
    }
    let laws = basis_laws::<F2>() + basis_laws::<F3>() + basis_laws::<F5>();
    format!("{cases} homomorphism cases over p = 2, 3, 5; {laws} commutation and [D, t_a] checks")
}

// ---------------------------------------------------------------------------
// 2. Lucas.

fn binomial_big(m: u32, n: u32) -> BigUint {
    if n > m {
        return BigUint::from(0u32);
    }
    let fact = |k: u32| (1..=k).fold(BigUint::from(1u32), |acc, i| acc * BigUint::from(i));
    fact(m) / (fact(n) * fact(m - n))
}

fn lucas_against_bigint<F: PrimeField>(table: &[Vec<BigUint>]) -> usize {
    let p = BigUint::from(F::CHARACTERISTIC);
    let mut count = 0;
    for m0 in 0..=20u32 {
        for m1 in 0..=20u32 {
            for n0 in 0..=20u32 {
                for n1 in 0..=20u32 {
                    let expect = (&table[m0 as usize][n0 as usize] * &table[m1 as usize][n1 as usize]) % &p;
                    let expect = expect.iter_u64_digits().next().unwrap_or(0);
                    let got: F =
                        lucas_binomial(&MultiIndex::new(vec![m0, m1]), &MultiIndex::new(vec![n0, n1])).unwrap();
                    assert_eq!(got.residue() as u64, expect, "p = {p}, m = ({m0},{m1}), n = ({n0},{n1})");
                    count += 1;
                }
            }
        }
    }
    count
}

fn criterion_2() -> String {
    let table: Vec<Vec<BigUint>> = (0..=20).map(|m| (0..=20).map(|n| binomial_big(m, n)).collect()).collect();
    let n = lucas_against_bigint::<F2>(&table)
        + lucas_against_bigint::<F3>(&table)
        + lucas_against_bigint::<F5>(&table)
        + lucas_against_bigint::<F7>(&table);
    format!("{n} multi-index binomials, m and n up to (20, 20), p = 2, 3, 5, 7")
}

// ---------------------------------------------------------------------------
// 3. Cartier round trip.

fn cartier_case<F: PrimeField>(rng: &mut ChaCha8Rng) {
    let v = vars_from(&["x"]);
    let rank = rng.gen_range(1..=3);
    let deg = rng.gen_range(0..=3);
    let h = random_unit_matrix::<F, _>(rng, &v, rank, deg);
    let c = Connection::frobenius_pullback(&Frame::new(h.clone()).unwrap(), &[0]).unwrap();
    // Independent of the constructor: A = -(dH) H^{-1}.
    let a = h.partial(0).checked_mul(&h.inverse_unit().unwrap()).unwrap().scale(-F::one());
    assert_eq!(c.matrices()[0], a);
    assert!(c.p_curvature().unwrap().iter().all(|m| m.is_zero()), "p-curvature of gauge of H = {h}");
    let g = c.cartier_descent(None).unwrap();
    assert!(frame_equivalence(g.matrix(), &h, &[0], 1).unwrap().is_some(), "no witness for H = {h}");
}

fn criterion_3() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cases = 120;
    for i in 0..cases {
        if i % 2 == 0 {
            cartier_case::<F2>(&mut rng)
        } else {
            cartier_case::<F3>(&mut rng)
        }
    }
    format!("{cases} unit gauges, rank <= 3, degree <= 3, p = 2, 3")
}

// ---------------------------------------------------------------------------
// 4. Tower round trip and level-one Leibniz rule.

fn tower_case<F: PrimeField>(rng: &mut ChaCha8Rng) {
    let rank = rng.gen_range(1..=2);
    let t = random_tower::<F, _>(rng, &["x"], &[], Mode::Absolute, rank, 2, 2);
    let s = t.stratification(2).unwrap();
    let d = descend_tower(&s, 2, None).unwrap();
    assert!(gauge_equivalent(&t, &d, 4).unwrap().is_some(), "tower {:?}", t.sigmas());
}

fn leibniz_case<F: PrimeField>(rng: &mut ChaCha8Rng) {
    let p = F::CHARACTERISTIC;
    let rank = rng.gen_range(1..=2);
    let t = random_tower::<F, _>(rng, &["x", "y"], &[], Mode::Absolute, rank, 2, 1);
    let vars = t.vars().clone();
    let w: Vec<Poly<F>> = (0..rank).map(|_| random_poly(rng, &vars, 1, 0.7)).collect();
    let e = t.sigmas()[0].mul_vec(&w.iter().map(|f| f.pow(p)).collect::<Vec<_>>()).unwrap();
    let a = random_poly::<F, _>(rng, &vars, 2, 0.6);
    let b: Vec<Poly<F>> = (0..2).map(|_| random_poly(rng, &vars, 1, 0.7)).collect();
    // nabla1(D) acts as sum_i b_i^p nabla(D_{p e_i}).
    let nabla1 = |v: &[Poly<F>]| -> Vec<Poly<F>> {
        let mut out = vec![Poly::zero(&vars); v.len()];
        for (i, bi) in b.iter().enumerate() {
            let img = t.stratified_action(&MultiIndex::axis(2, i, p), v).unwrap();
            let bp = bi.pow(p);
            for (o, x) in out.iter_mut().zip(img) {
                *o = o.checked_add(&bp.checked_mul(&x).unwrap()).unwrap();
            }
        }
        out
    };
    let ap = a.pow(p);
    let ape: Vec<Poly<F>> = e.iter().map(|x| ap.checked_mul(x).unwrap()).collect();
    let lhs = nabla1(&ape);
    let da = b[0].checked_mul(&a.partial(0)).unwrap().checked_add(&b[1].checked_mul(&a.partial(1)).unwrap()).unwrap();
    let dap = da.pow(p);
    let rhs: Vec<Poly<F>> = nabla1(&e)
        .iter()
        .zip(&e)
        .map(|(n, x)| ap.checked_mul(n).unwrap().checked_add(&dap.checked_mul(x).unwrap()).unwrap())
        .collect();
    assert_eq!(lhs, rhs, "Leibniz rule fails for a = {a}");
}

fn criterion_4() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let towers = 60;
    for i in 0..towers {
        if i % 2 == 0 {
            tower_case::<F2>(&mut rng)
        } else {
            tower_case::<F3>(&mut rng)
        }
    }
    let leibniz = 120;
    for i in 0..leibniz {
        if i % 2 == 0 {
            leibniz_case::<F2>(&mut rng)
        } else {
            leibniz_case::<F3>(&mut rng)
        }
    }
    format!("{towers} tower round trips (rank <= 2, length 2, degree <= 2); {leibniz} Leibniz instances")
}

// ---------------------------------------------------------------------------
// 5. Horizontal sections.

/// Exponents k <= d whose monomial is killed by every D_n with 0 < n < p^level.
fn monomial_kernel(p: u32, level: u32, d: u32) -> Vec<u32> {
    let q = p.pow(level);
    (0..=d).filter(|&k| (1..q).all(|n| binomial_big(k, n) % BigUint::from(p) == BigUint::from(0u32))).collect()
}

fn criterion_5() -> String {
    let mut checks = 0;
    for r in 1..=3 {
        let t = Tower::<F2>::identity(vec!["x".into()], vec![], Mode::Absolute, r, 3).unwrap();
        for level in 1..=3usize {
            for d in 0..=8u32 {
                let dim = t.truncated_h0(level, d).unwrap().dimension();
                let expect = r * monomial_kernel(2, level as u32, d).len();
                assert_eq!(dim, expect, "identity rank {r}, L = {level}, D = {d}");
                assert_eq!(dim, r * (1 + (d / 2u32.pow(level as u32)) as usize));
                if 2u32.pow(level as u32) > d {
                    assert_eq!(dim, r);
                }
                checks += 1;
            }
        }
        let long = t.extend(4);
        for d in 0..=8u32 {
            assert_eq!(long.h0_str(d).unwrap().dimension, r);
        }
    }
    let t = Tower::<F2>::identity(vec!["x".into()], vec![], Mode::Absolute, 1, 2).unwrap();
    let x = t.vars().iter().position(|v| v == "x").unwrap();
    for level in 1..=2usize {
        for d in 0..=8u32 {
            let kernel = monomial_kernel(2, level as u32, d);
            let h = t.truncated_h0(level, d).unwrap();
            assert_eq!(h.dimension(), kernel.len());
            for v in &h.basis {
                for (e, _) in v[0].terms() {
                    assert!(kernel.contains(&e.as_slice()[x]), "x^{} is not horizontal", e.as_slice()[x]);
                }
            }
            checks += 1;
        }
    }
    format!("{checks} (rank, L, D) cells against the exhaustive monomial kernel; h0_str = r for D <= 8")
}

// ---------------------------------------------------------------------------
// 6. Projection formula.

fn projection_case<F: PrimeField>(rng: &mut ChaCha8Rng) {
    let rank = rng.gen_range(1..=2);
    let m = random_tower::<F, _>(rng, &["s"], &[], Mode::Absolute, rank, 2, 2);
    let up = pullback(&m, &["x"]).unwrap();
    let split = RelativeSplit::of(&up);
    let gm = gm_pushforward(&up, &split, 2, 0, None).unwrap();
    assert!(gm.stabilized);
    assert_eq!(gm.rank(), rank);
    assert!(gauge_equivalent(&gm.tower, &m, 4).unwrap().is_some(), "base tower {:?}", m.sigmas());
}

fn criterion_6() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let cases = 40;
    for i in 0..cases {
        if i % 2 == 0 {
            projection_case::<F2>(&mut rng)
        } else {
            projection_case::<F3>(&mut rng)
        }
    }
    format!("{cases} random base towers (rank <= 2, degree <= 2, p = 2, 3)")
}

// ---------------------------------------------------------------------------
// 7 and 8. Curated family on the (x, s)-plane.

struct Curated {
    p: u32,
    sigmas: &'static [&'static [&'static [&'static str]]],
    length: usize,
    level: usize,
    degree: u32,
}

const CURATED: &[Curated] = &[
    Curated { p: 2, sigmas: &[&[&["1", "x^2*s"], &["0", "1"]]], length: 3, level: 3, degree: 3 },
    Curated { p: 2, sigmas: &[&[&["1", "x*s"], &["0", "1"]]], length: 2, level: 2, degree: 1 },
    Curated { p: 2, sigmas: &[&[&["1", "x^2"], &["0", "1"]]], length: 3, level: 3, degree: 2 },
    Curated {
        p: 2,
        sigmas: &[&[&["1", "s"], &["0", "1"]], &[&["1", "0"], &["s", "1"]]],
        length: 3,
        level: 3,
        degree: 3,
    },
    Curated {
        p: 2,
        sigmas: &[&[&["1", "0"], &["x^2*s", "1"]], &[&["1", "s"], &["0", "1"]]],
        length: 3,
        level: 3,
        degree: 3,
    },
    Curated { p: 2, sigmas: &[&[&["1", "x^2 + s"], &["0", "1"]]], length: 3, level: 3, degree: 3 },
    Curated { p: 2, sigmas: &[&[&["1", "x^2*s^2"], &["0", "1"]]], length: 3, level: 3, degree: 2 },
    Curated { p: 2, sigmas: &[&[&["1", "0"], &["0", "1"]]], length: 2, level: 2, degree: 1 },
    Curated { p: 3, sigmas: &[&[&["1", "x^3*s"], &["0", "1"]]], length: 3, level: 3, degree: 5 },
    Curated { p: 3, sigmas: &[&[&["1", "s"], &["0", "1"]]], length: 2, level: 2, degree: 2 },
    Curated { p: 3, sigmas: &[&[&["1", "x*s"], &["0", "1"]]], length: 2, level: 2, degree: 2 },
    Curated { p: 3, sigmas: &[&[&["1", "0"], &["x^3 + s", "1"]]], length: 3, level: 3, degree: 4 },
    Curated { p: 3, sigmas: &[&[&["1"]]], length: 2, level: 2, degree: 2 },
];

fn curated_tower<F: PrimeField>(c: &Curated) -> Tower<F> {
    let sigmas: Vec<Vec<Vec<String>>> = c.sigmas.iter().map(|m| rows(m)).collect();
    let rank = sigmas[0].len();
    Tower::from_strings(vec!["x".into()], vec!["s".into()], Mode::Absolute, rank, &sigmas).unwrap().extend(c.length)
}

/// The fiber tower at s = c, rebuilt over the single variable x.
fn fiber_tower<F: PrimeField>(t: &Tower<F>, c: F) -> Tower<F> {
    let sigmas: Vec<Vec<Vec<String>>> =
        t.sigmas().iter().map(|m| m.eval_partial(&[("s", c)]).unwrap().to_strings()).collect();
    Tower::from_strings(vec!["x".into()], vec![], Mode::Absolute, t.rank(), &sigmas).unwrap()
}

/// Horizontal sections of a one-variable tower at level L within degree D,
/// from the composite frame alone: v is horizontal iff D_n(G^{-1} v) = 0.
fn horizontal_oracle<F: PrimeField>(t: &Tower<F>, level: usize, d: u32) -> Vec<Vec<Poly<F>>> {
    let vars = t.vars().clone();
    let p = F::CHARACTERISTIC;
    let mut g = PolyMatrix::identity(&vars, t.rank());
    for (i, s) in t.sigmas().iter().enumerate() {
        g = g.checked_mul(&s.frobenius_at(&[0], i as u32)).unwrap();
    }
    let ginv = g.inverse_unit().unwrap();
    let r = t.rank();
    let mut unknowns = Vec::new();
    let mut columns = Vec::new();
    for j in 0..r {
        for k in 0..=d {
            let mut v = vec![Poly::zero(&vars); r];
            v[j] = Poly::monomial(&vars, MultiIndex::new(vec![k]), F::one());
            let u = ginv.mul_vec(&v).unwrap();
            let mut col = BTreeMap::new();
            for n in 1..p.pow(level as u32) {
                let du: Vec<Poly<F>> =
                    u.iter().map(|e| e.divided_derivative(&[0], &MultiIndex::new(vec![n]))).collect();
                for (jj, (deg, c)) in vector_coords(&du, 0).into_iter().map(|((a, b), c)| (a, (b, c))) {
                    col.insert((jj, n, deg), c);
                }
            }
            columns.push(col);
            unknowns.push(v);
        }
    }
    kernel_mod(&columns, p as u64)
        .into_iter()
        .map(|coeffs| {
            let mut out = vec![Poly::zero(&vars); r];
            for (c, v) in coeffs.iter().zip(&unknowns) {
                if *c != 0 {
                    for (o, x) in out.iter_mut().zip(v) {
                        *o = o.checked_add(&x.scale(F::from_u64(*c))).unwrap();
                    }
                }
            }
            out
        })
        .collect()
}

fn evaluate_columns<F: PrimeField>(cols: &[Vec<Poly<F>>], c: F) -> Vec<Vec<Poly<F>>> {
    cols.iter().map(|v| v.iter().map(|e| e.eval_partial(&[("s", c)]).unwrap()).collect()).collect()
}

fn base_change_curated<F: PrimeField>(c: &Curated) -> usize {
    let t = curated_tower::<F>(c);
    let split = RelativeSplit::of(&t);
    let x = t.vars().iter().position(|v| v == "x").unwrap();
    let report = base_change_check(&t, &split, c.level, c.degree, None).unwrap();
    assert!(report.stabilized, "curated tower {:?} did not stabilize", c.sigmas);
    assert!(report.all_equal(), "library base change fails for {:?}", c.sigmas);
    let gm = gm_pushforward(&t, &split, c.level, c.degree, None).unwrap();
    let mut dims = Vec::new();
    for k in 0..F::CHARACTERISTIC {
        let pt = F::from_u64(k as u64);
        let fiber = horizontal_oracle(&fiber_tower(&t, pt), c.level, c.degree);
        let gens = evaluate_columns(&gm.embedding, pt);
        let fib: Vec<_> = fiber.iter().map(|v| vector_coords(v, 0)).collect();
        let gen: Vec<_> = gens.iter().map(|v| vector_coords(v, x)).collect();
        let both: Vec<_> = fib.iter().chain(&gen).cloned().collect();
        let p = F::CHARACTERISTIC as u64;
        let (rf, rg, rb) = (rank_mod(&fib, p), rank_mod(&gen, p), rank_mod(&both, p));
        assert!(rf == rg && rg == rb, "{:?} at s = {k}: fiber {rf}, generators {rg}, joint {rb}", c.sigmas);
        dims.push(rf);
    }
    assert!(dims.windows(2).all(|w| w[0] == w[1]), "fiber dimensions vary: {dims:?}");
    dims.len()
}

/// Is v in the F_p[x]-span of `basis`? Coefficient degrees up to `bound`.
fn in_module<F: PrimeField>(basis: &[Vec<Poly<F>>], v: &[Poly<F>], x: usize, bound: u32) -> bool {
    let vars = v[0].vars().clone();
    let mut gens = Vec::new();
    for b in basis {
        for t in 0..=bound {
            let mut e = vec![0u32; vars.len()];
            e[x] = t;
            let shifted: Vec<Poly<F>> =
                b.iter().map(|f| f.mul_monomial(&MultiIndex::new(e.clone()), F::one())).collect();
            gens.push(vector_coords(&shifted, x));
        }
    }
    let p = F::CHARACTERISTIC as u64;
    let r = rank_mod(&gens, p);
    gens.push(vector_coords(v, x));
    rank_mod(&gens, p) == r
}

/// A family of k columns in F_p[x]^r spans a saturated submodule iff the
/// gcd of its k x k minors is a nonzero constant.
fn saturated<F: PrimeField>(cols: &[Vec<Poly<F>>], x: usize) -> bool {
    if cols.is_empty() {
        return true;
    }
    let vars = cols[0][0].vars().clone();
    let m = PolyMatrix::from_columns(&vars, cols).unwrap();
    let (r, k) = (m.nrows(), m.ncols());
    let p = F::CHARACTERISTIC as u64;
    let mut g: Vec<u64> = Vec::new();
    let mut pick = vec![0usize; 0];
    fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            subsets(n, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut all = Vec::new();
    subsets(r, k, 0, &mut pick, &mut all);
    let colidx: Vec<usize> = (0..k).collect();
    for rows in all {
        let d = m.submatrix(&rows, &colidx).det().unwrap();
        g = uni_gcd(g, univariate(&d, x), p);
    }
    g.len() == 1
}

fn maxsub_curated<F: PrimeField>(c: &Curated) -> usize {
    let t = curated_tower::<F>(c);
    let split = RelativeSplit::of(&t);
    let x = t.vars().iter().position(|v| v == "x").unwrap();
    let m = maximal_pullback_sub(&t, &split, c.level, c.degree, None).unwrap();
    assert!(m.gm.stabilized);
    assert!(m.all_equal(), "library comparison fails for {:?}", c.sigmas);
    let bound = 2 * c.degree + 4;
    for k in 0..F::CHARACTERISTIC {
        let pt = F::from_u64(k as u64);
        let sub = evaluate_columns(&m.embedding, pt);
        let fiber = horizontal_oracle(&fiber_tower(&t, pt), c.level, c.degree);
        let fiber: Vec<Vec<Poly<F>>> =
            fiber.iter().map(|v| v.iter().map(|e| e.embed(t.vars()).unwrap()).collect()).collect();
        assert!(saturated(&sub, x), "{:?}: restricted sub-bundle is not saturated at s = {k}", c.sigmas);
        assert!(saturated(&fiber, x) || fiber.is_empty());
        for v in &sub {
            assert!(in_module(&fiber, v, x, bound), "{:?}: generator outside the trivial part at s = {k}", c.sigmas);
        }
        for v in &fiber {
            assert!(in_module(&sub, v, x, bound), "{:?}: horizontal section missed at s = {k}", c.sigmas);
        }
    }
    F::CHARACTERISTIC as usize
}

fn criterion_7() -> String {
    let mut points = 0;
    for c in CURATED {
        points += match c.p {
            2 => base_change_curated::<F2>(c),
            _ => base_change_curated::<F3>(c),
        };
    }
    format!(
        "{} curated towers, {points} fiber points, generator span = fiber sections, constant dimension",
        CURATED.len()
    )
}

fn criterion_8() -> String {
    let mut points = 0;
    for c in CURATED {
        points += match c.p {
            2 => maxsub_curated::<F2>(c),
            _ => maxsub_curated::<F3>(c),
        };
    }
    format!("{} curated towers, {points} fiber points, F_p[x]-modules equal and saturated", CURATED.len())
}

// ---------------------------------------------------------------------------
// 9. Kuenneth.

fn kunneth_pair<F: PrimeField>(rng: &mut ChaCha8Rng, level: usize, d1: u32, d2: u32) -> Option<(usize, usize)> {
    let ra = rng.gen_range(1..=2);
    let rb = rng.gen_range(1..=2);
    let a = random_tower::<F, _>(rng, &["x"], &[], Mode::Absolute, ra, level, 1);
    let b = random_tower::<F, _>(rng, &["y"], &[], Mode::Absolute, rb, level, 1);
    let stable = |t: &Tower<F>| {
        let lo = t.truncated_h0(level, d1).unwrap().dimension();
        (lo == t.truncated_h0(level, d2).unwrap().dimension()).then_some(lo)
    };
    let (da, db) = (stable(&a)?, stable(&b)?);
    let ab = external_product(&a, &b).unwrap();
    let dab = ab.truncated_h0(level, d2).unwrap().dimension();
    assert_eq!(dab, da * db, "a = {:?}, b = {:?}", a.sigmas(), b.sigmas());
    Some((da, db))
}

fn criterion_9() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut pairs, mut tried, mut nontrivial) = (0, 0, 0);
    while pairs < 24 && tried < 400 {
        tried += 1;
        let r =
            if tried % 2 == 0 { kunneth_pair::<F2>(&mut rng, 3, 3, 7) } else { kunneth_pair::<F3>(&mut rng, 2, 4, 8) };
        if let Some((a, b)) = r {
            pairs += 1;
            if a > 0 && b > 0 {
                nontrivial += 1;
            }
        }
    }
    assert!(pairs >= 20, "only {pairs} stabilized pairs in {tried} draws");
    format!("{pairs} stabilized pairs ({nontrivial} with both sides nonzero) out of {tried} draws")
}

// ---------------------------------------------------------------------------
// 10. Lift independence.

fn lift_case<F: PrimeField>(rng: &mut ChaCha8Rng) -> usize {
    let rank = rng.gen_range(1..=2);
    let t = random_tower::<F, _>(rng, &["x"], &["s"], Mode::Absolute, rank, 2, 1);
    let split = RelativeSplit::of(&t);
    let m = relative_h0(&t, &split, 2, F::CHARACTERISTIC - 1).unwrap();
    let h = random_poly::<F, _>(rng, t.vars(), 2, 0.6);
    let mut compared = 0;
    for k in 0..F::CHARACTERISTIC {
        match (tau_action(&t, &split, &m, k), tau_action_lifted(&t, &split, &m, k, std::slice::from_ref(&h))) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a, b, "lift changes the action for k = {k}, h = {h}");
                compared += 1;
            }
            (Err(a), Err(b)) => assert_eq!(a, b),
            (a, b) => panic!("lifts disagree: {a:?} vs {b:?}"),
        }
    }
    compared
}

fn criterion_10() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut instances, mut matrices, mut tried) = (0, 0, 0);
    while instances < 36 && tried < 200 {
        tried += 1;
        let n = if tried % 2 == 0 { lift_case::<F2>(&mut rng) } else { lift_case::<F3>(&mut rng) };
        if n > 0 {
            instances += 1;
            matrices += n;
        }
    }
    assert!(instances >= 30, "only {instances} comparable instances");
    format!("{instances} relative_h0 instances, {matrices} action matrices compared")
}

// ---------------------------------------------------------------------------
// 11. CLI contract through the built binary.

fn strat(args: &[&str]) -> (i32, Vec<u8>) {
    let data = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let out = Command::new(env!("CARGO_BIN_EXE_strat"))
        .args(args)
        .current_dir(data)
        .env_remove("STRAT_MAX_DEGREE")
        .output()
        .expect("spawn strat");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_11() -> String {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden");
    let golden = golden.to_str().unwrap();
    let (c1, o1) = strat(&["selftest", "--golden-dir", golden]);
    let (c2, o2) = strat(&["selftest", "--golden-dir", golden]);
    assert_eq!(c1, 0, "{}", String::from_utf8_lossy(&o1));
    assert_eq!((c1, &o1), (c2, &o2), "selftest output differs between runs");
    let mut commands = 0;
    for case in strat_cli::selftest::CASES {
        if let strat_cli::selftest::Check::Command(args) = &case.check {
            let mut argv = args.to_vec();
            argv.extend(["--format", "text"]);
            let a = strat(&argv);
            let b = strat(&argv);
            assert_eq!(a, b, "{} differs between runs", case.name);
            let expected = std::fs::read_to_string(format!("{golden}/{}.txt", case.name)).unwrap();
            let actual = format!("exit: {}\n{}", a.0, String::from_utf8(a.1).unwrap());
            assert_eq!(actual, expected, "{} does not match its golden file", case.name);
            commands += 1;
        }
    }
    let (obstruction, _) = strat(&["descend", "nonflat_rank1.json", "--levels", "2"]);
    assert_eq!(obstruction, 1);
    let (cap, _) = strat(&["descend", "cap_hit.json", "--levels", "1", "--max-degree", "0"]);
    assert_eq!(cap, 2);
    format!("selftest identical across runs; {commands} golden commands byte-identical; obstruction exits 1; cap hit exits 2")
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> String);
    let criteria: [Criterion; 11] = [
        ("operator algebra", criterion_1),
        ("Lucas oracle", criterion_2),
        ("Cartier round trip", criterion_3),
        ("tower round trip and Leibniz", criterion_4),
        ("horizontal sections", criterion_5),
        ("projection formula", criterion_6),
        ("base change on the curated family", criterion_7),
        ("maximal pulled-back subobject", criterion_8),
        ("Kuenneth dimensions", criterion_9),
        ("lift independence", criterion_10),
        ("CLI determinism and exit codes", criterion_11),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1}s]", i + 1),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {:>2} FAIL  {name}: {msg} [{secs:.1}s]", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
