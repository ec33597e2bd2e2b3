//! Dense linear algebra over `F_p`: kernels, ranks and echelon forms.

use crate::arith::field::PrimeField;

/// Reduced row echelon form in place, scanning columns in the given order.
/// Returns the pivot columns, one per nonzero row, in row order.
fn rref_with_order<F: PrimeField>(rows: &mut Vec<Vec<F>>, order: &[usize]) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for &c in order {
        if r == rows.len() {
            break;
        }
        let Some(pr) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, pr);
        let inv = rows[r][c].inverse().unwrap();
        for v in rows[r].iter_mut() {
            *v *= inv;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f.is_zero() {
                continue;
            }
            for (dst, &src) in row.iter_mut().zip(&pivot_row) {
                if !src.is_zero() {
                    *dst -= f * src;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Row echelon form with columns scanned left to right.
pub fn rref<F: PrimeField>(rows: &mut Vec<Vec<F>>, ncols: usize) -> Vec<usize> {
    let order: Vec<usize> = (0..ncols).collect();
    rref_with_order(rows, &order)
}

pub fn rank<F: PrimeField>(rows: &[Vec<F>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{ x : M x = 0 }` where `M` is given by its rows.
pub fn kernel<F: PrimeField>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let mut is_pivot = vec![None; ncols];
    for (r, &c) in pivots.iter().enumerate() {
        is_pivot[c] = Some(r);
    }
    let mut out = Vec::new();
    for free in 0..ncols {
        if is_pivot[free].is_some() {
            continue;
        }
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -m[r][free];
        }
        out.push(v);
    }
    out
}

/// Kernel of a sparse system given column by column: `columns[j]` lists the
/// nonzero entries `(row, value)` of column `j`.
pub fn kernel_of_columns<F: PrimeField>(columns: &[Vec<(usize, F)>], nrows: usize) -> Vec<Vec<F>> {
    let ncols = columns.len();
    let mut rows = vec![vec![F::zero(); ncols]; nrows];
    for (j, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            rows[i][j] += v;
        }
    }
    rows.retain(|r| r.iter().any(|v| !v.is_zero()));
    kernel(&rows, ncols)
}

/// Reduced echelon basis of the span of `vectors` in which every basis
/// vector has a distinct *last* nonzero coordinate (its leading position),
/// and no other basis vector is nonzero there. Sorted by leading position.
pub fn echelon_by_leading<F: PrimeField>(vectors: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = vectors.to_vec();
    let order: Vec<usize> = (0..ncols).rev().collect();
    let pivots = rref_with_order(&mut m, &order);
    let mut paired: Vec<(usize, Vec<F>)> = pivots.into_iter().zip(m).collect();
    paired.sort_by_key(|(c, _)| *c);
    paired.into_iter().map(|(_, v)| v).collect()
}

/// Index of the last nonzero coordinate.
pub fn leading_position<F: PrimeField>(v: &[F]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

/// Incrementally maintained row space, used for span-membership tests.
#[derive(Clone, Debug)]
pub struct SpanBuilder<F> {
    ncols: usize,
    rows: Vec<(usize, Vec<F>)>,
}

impl<F: PrimeField> SpanBuilder<F> {
    pub fn new(ncols: usize) -> Self {
        SpanBuilder { ncols, rows: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `v` against the current rows; the residue is zero iff `v` is in the span.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut v = v.to_vec();
        for (c, row) in &self.rows {
            let f = v[*c];
            if f.is_zero() {
                continue;
            }
            for (dst, &src) in v.iter_mut().zip(row) {
                if !src.is_zero() {
                    *dst -= f * src;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[F]) -> bool {
        self.reduce(v).iter().all(|c| c.is_zero())
    }

    /// Insert `v`; returns false if it was already in the span.
    pub fn insert(&mut self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ncols);
        let mut r = self.reduce(v);
        let Some(c) = leading_position(&r) else {
            return false;
        };
        let inv = r[c].inverse().unwrap();
        for x in r.iter_mut() {
            *x *= inv;
        }
        for (_, row) in self.rows.iter_mut() {
            let f = row[c];
            if f.is_zero() {
                continue;
            }
            for (dst, &src) in row.iter_mut().zip(&r) {
                if !src.is_zero() {
                    *dst -= f * src;
                }
            }
        }
        self.rows.push((c, r));
        true
    }
}
