//! Module computations over the principal ideal domain `F_p[s]`.
//!
//! Vectors are columns `Vec<UniPoly<F>>`; a matrix is a list of columns.

use crate::arith::field::PrimeField;
use crate::arith::unipoly::UniPoly;

pub type RVector<F> = Vec<UniPoly<F>>;

fn axpy<F: PrimeField>(dst: &mut [UniPoly<F>], q: &UniPoly<F>, src: &[UniPoly<F>]) {
    // dst -= q * src
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d = &*d - &(q * s);
        }
    }
}

/// Column-reduce `columns` over the rows in `row_order`; for each row the
/// remaining columns are combined by a unimodular Euclidean sweep until at
/// most one is nonzero there. `aux` columns receive the same operations.
/// Returns the pivot list `(row, column)` in processing order.
fn column_reduce<F: PrimeField>(
    columns: &mut [RVector<F>],
    aux: &mut [RVector<F>],
    row_order: &[usize],
) -> Vec<(usize, usize)> {
    let n = columns.len();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::new();
    for &row in row_order {
        loop {
            let nonzero: Vec<usize> = active.iter().copied().filter(|&c| !columns[c][row].is_zero()).collect();
            if nonzero.len() <= 1 {
                if let Some(&c) = nonzero.first() {
                    pivots.push((row, c));
                    active.retain(|&a| a != c);
                }
                break;
            }
            let &piv = nonzero.iter().min_by_key(|&&c| (columns[c][row].degree().unwrap(), c)).unwrap();
            let pc = columns[piv].clone();
            let pa = aux.get(piv).cloned();
            for &c in &nonzero {
                if c == piv {
                    continue;
                }
                let (q, _) = columns[c][row].div_rem(&pc[row]);
                axpy(&mut columns[c], &q, &pc);
                if let Some(pa) = &pa {
                    axpy(&mut aux[c], &q, pa);
                }
            }
        }
        if active.is_empty() {
            break;
        }
    }
    pivots
}

/// A basis of `{ v in R^n : M v = 0 }` for `M` given by its `n` columns of
/// length `m`. The kernel of a unimodular reduction is saturated.
pub fn kernel<F: PrimeField>(columns: &[RVector<F>], nrows: usize) -> Vec<RVector<F>> {
    let n = columns.len();
    let mut cols = columns.to_vec();
    let mut aux: Vec<RVector<F>> =
        (0..n).map(|j| (0..n).map(|i| if i == j { UniPoly::one() } else { UniPoly::zero() }).collect()).collect();
    let rows: Vec<usize> = (0..nrows).collect();
    column_reduce(&mut cols, &mut aux, &rows);
    let basis: Vec<RVector<F>> =
        (0..n).filter(|&j| cols[j].iter().all(|e| e.is_zero())).map(|j| aux[j].clone()).collect();
    hermite(&basis)
}

/// Column Hermite normal form of the module spanned by `vectors`, pivoting
/// from the last row upward. Pivots are monic, entries beside a pivot are
/// reduced modulo it, and columns are sorted by pivot row.
pub fn hermite<F: PrimeField>(vectors: &[RVector<F>]) -> Vec<RVector<F>> {
    let Some(len) = vectors.first().map(|v| v.len()) else {
        return Vec::new();
    };
    let mut cols = vectors.to_vec();
    let order: Vec<usize> = (0..len).rev().collect();
    let pivots = column_reduce(&mut cols, &mut [], &order);
    let mut done: Vec<(usize, usize)> = Vec::new();
    for &(row, c) in &pivots {
        let lead = cols[c][row].lead();
        let inv = lead.inverse().unwrap();
        cols[c] = cols[c].iter().map(|e| e.scale(inv)).collect();
        let pc = cols[c].clone();
        for &(_, other) in &done {
            let (q, _) = cols[other][row].div_rem(&pc[row]);
            if !q.is_zero() {
                axpy(&mut cols[other], &q, &pc);
            }
        }
        done.push((row, c));
    }
    done.sort_by_key(|&(row, _)| row);
    done.into_iter().map(|(_, c)| cols[c].clone()).collect()
}

/// Row index of the last nonzero entry.
pub fn pivot_row<F: PrimeField>(v: &[UniPoly<F>]) -> Option<usize> {
    v.iter().rposition(|e| !e.is_zero())
}

/// Coefficients `c` with `sum_j c_j basis_j = v` for a basis in the form
/// produced by [`hermite`]; `None` if `v` is outside the span.
pub fn solve<F: PrimeField>(basis: &[RVector<F>], v: &[UniPoly<F>]) -> Option<RVector<F>> {
    let mut rest = v.to_vec();
    let mut coeffs = vec![UniPoly::zero(); basis.len()];
    for (j, b) in basis.iter().enumerate().rev() {
        let row = pivot_row(b)?;
        if rest[row].is_zero() {
            continue;
        }
        let q = rest[row].exact_div(&b[row])?;
        axpy(&mut rest, &q, b);
        coeffs[j] = q;
    }
    rest.iter().all(|e| e.is_zero()).then_some(coeffs)
}
