//! Connections on free modules, p-curvature and Cartier descent.
//!
//! Convention: `∇(∂_i) = ∂_i + A_i` on column vectors. A frame `G` of
//! horizontal sections satisfies `∂_i G + A_i G = 0`, and the connection
//! with frame `G` has `A_i = -∂_i(G) G^{-1}`.

use std::collections::HashMap;

use crate::arith::field::PrimeField;
use crate::arith::multi_index::MultiIndex;
use crate::arith::poly::{same_vars, var_index, Poly, Vars};
use crate::error::{Error, Result};
use crate::linalg::fp::{echelon_by_leading, kernel_of_columns, leading_position};
use crate::linalg::matrix::{PolyMatrix, PolyVector};

/// A free module of rank `r` with connection matrices along the active variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection<F: PrimeField> {
    vars: Vars,
    active: Vec<usize>,
    rank: usize,
    matrices: Vec<PolyMatrix<F>>,
}

/// A square matrix with nonzero constant determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame<F: PrimeField> {
    matrix: PolyMatrix<F>,
    det: F,
}

impl<F: PrimeField> Frame<F> {
    pub fn new(matrix: PolyMatrix<F>) -> Result<Self> {
        let det = matrix.unit_determinant()?;
        Ok(Frame { matrix, det })
    }

    pub fn matrix(&self) -> &PolyMatrix<F> {
        &self.matrix
    }

    pub fn det(&self) -> F {
        self.det
    }

    pub fn into_matrix(self) -> PolyMatrix<F> {
        self.matrix
    }
}

impl<F: PrimeField> Connection<F> {
    /// `matrices[i]` is `A` along the variable at `active[i]`.
    pub fn new(vars: &Vars, active: &[usize], matrices: Vec<PolyMatrix<F>>) -> Result<Self> {
        if matrices.len() != active.len() {
            return Err(Error::Dimension(format!(
                "{} connection matrices for {} variables",
                matrices.len(),
                active.len()
            )));
        }
        if active.iter().any(|&i| i >= vars.len()) {
            return Err(Error::Dimension("active position out of range".into()));
        }
        let rank = matrices.first().map_or(0, |m| m.nrows());
        for m in &matrices {
            if !m.is_square() || m.nrows() != rank {
                return Err(Error::Dimension("connection matrices must be square of equal size".into()));
            }
            if !same_vars(m.vars(), vars) {
                return Err(Error::Dimension("connection matrix over different variables".into()));
            }
        }
        Ok(Connection { vars: vars.clone(), active: active.to_vec(), rank, matrices })
    }

    /// Build from variable names: the variables are `fiber ++ base` and the
    /// fiber variables are active.
    pub fn from_split(fiber: &[String], base: &[String], matrices: Vec<PolyMatrix<F>>) -> Result<Self> {
        let names: Vec<&String> = fiber.iter().chain(base).collect();
        let vars: Vars = names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into();
        let active: Vec<usize> = (0..fiber.len()).collect();
        let matrices = matrices.into_iter().map(|m| m.embed(&vars)).collect::<Result<Vec<_>>>()?;
        Self::new(&vars, &active, matrices)
    }

    pub fn trivial(vars: &Vars, active: &[usize], rank: usize) -> Self {
        let matrices = active.iter().map(|_| PolyMatrix::zero(vars, rank, rank)).collect();
        Connection { vars: vars.clone(), active: active.to_vec(), rank, matrices }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn active_names(&self) -> Vec<String> {
        self.active.iter().map(|&i| self.vars[i].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrices(&self) -> &[PolyMatrix<F>] {
        &self.matrices
    }

    pub fn matrix_for(&self, name: &str) -> Result<&PolyMatrix<F>> {
        let pos = var_index(&self.vars, name)?;
        let i = self.active.iter().position(|&a| a == pos).ok_or_else(|| Error::Name(name.to_string()))?;
        Ok(&self.matrices[i])
    }

    fn max_degree(&self) -> u32 {
        self.matrices.iter().filter_map(|m| m.max_degree()).max().unwrap_or(0)
    }

    /// `∂_i M + A_i M` for the `i`-th active variable, column by column.
    pub fn apply_matrix(&self, i: usize, m: &PolyMatrix<F>) -> Result<PolyMatrix<F>> {
        m.partial(self.active[i]).checked_add(&self.matrices[i].checked_mul(m)?)
    }

    /// `∇(∂_i) v = ∂_i v + A_i v`.
    pub fn apply(&self, i: usize, v: &[Poly<F>]) -> Result<PolyVector<F>> {
        let av = self.matrices[i].mul_vec(v)?;
        Ok(v.iter().zip(av).map(|(x, y)| &x.partial(self.active[i]) + &y).collect())
    }

    /// `∂_i A_j + A_i A_j - ∂_j A_i - A_j A_i`.
    pub fn curvature(&self, i: usize, j: usize) -> Result<PolyMatrix<F>> {
        let (ai, aj) = (&self.matrices[i], &self.matrices[j]);
        let lhs = aj.partial(self.active[i]).checked_add(&ai.checked_mul(aj)?)?;
        let rhs = ai.partial(self.active[j]).checked_add(&aj.checked_mul(ai)?)?;
        lhs.checked_sub(&rhs)
    }

    pub fn check_integrable(&self) -> Result<()> {
        for i in 0..self.active.len() {
            for j in i + 1..self.active.len() {
                if !self.curvature(i, j)?.is_zero() {
                    return Err(Error::Integrability(format!(
                        "curvature along ({}, {}) is nonzero",
                        self.vars[self.active[i]], self.vars[self.active[j]]
                    )));
                }
            }
        }
        Ok(())
    }

    /// The integrability identity for every pair of active variables.
    pub fn is_flat(&self) -> bool {
        self.check_integrable().is_ok()
    }

    /// `ψ_i`, the matrix of `∇(∂_i)^p` on the standard basis.
    pub fn p_curvature(&self) -> Result<Vec<PolyMatrix<F>>> {
        self.check_integrable()?;
        let p = F::CHARACTERISTIC;
        (0..self.active.len())
            .map(|i| {
                let mut m = PolyMatrix::identity(&self.vars, self.rank);
                for _ in 0..p {
                    m = self.apply_matrix(i, &m)?;
                }
                Ok(m)
            })
            .collect()
    }

    /// Integrable with vanishing p-curvature, else the matching error.
    pub fn check_p_flat(&self) -> Result<()> {
        for (i, psi) in self.p_curvature()?.iter().enumerate() {
            if !psi.is_zero() {
                return Err(Error::Flatness { variable: self.vars[self.active[i]].clone() });
            }
        }
        Ok(())
    }

    /// `A'_i = H^{-1}(A_i H + ∂_i H)`, the connection in the basis given by
    /// the columns of `H`.
    pub fn gauge_transform(&self, h: &PolyMatrix<F>) -> Result<Self> {
        if h.nrows() != self.rank || !h.is_square() {
            return Err(Error::Dimension("gauge matrix has the wrong size".into()));
        }
        let h_inv = h.inverse_unit()?;
        let matrices =
            (0..self.active.len()).map(|i| h_inv.checked_mul(&self.apply_matrix(i, h)?)).collect::<Result<Vec<_>>>()?;
        Self::new(&self.vars, &self.active, matrices)
    }

    /// The connection on `F^*` of a module with basis the columns of `G`:
    /// `A_i = -∂_i(G) G^{-1}`.
    pub fn frobenius_pullback(frame: &Frame<F>, active: &[usize]) -> Result<Self> {
        let g = frame.matrix();
        let g_inv = g.inverse_unit()?;
        let neg = -F::one();
        let matrices =
            active.iter().map(|&a| Ok(g.partial(a).checked_mul(&g_inv)?.scale(neg))).collect::<Result<Vec<_>>>()?;
        Self::new(g.vars(), active, matrices)
    }

    /// Default degree cap for [`Connection::cartier_descent`].
    pub fn default_degree_cap(&self) -> usize {
        4 * (1 + self.max_degree() as usize)
    }

    /// A frame of horizontal sections over the twisted ring.
    ///
    /// Deepens the degree bound from 0 to `max_degree` (or the default cap),
    /// solving the `F_p`-linear horizontality system each time.
    pub fn cartier_descent(&self, max_degree: Option<usize>) -> Result<Frame<F>> {
        self.check_p_flat()?;
        let cap = max_degree.unwrap_or_else(|| self.default_degree_cap());
        if self.rank == 0 {
            return Frame::new(PolyMatrix::identity(&self.vars, 0));
        }
        for d in 0..=cap {
            if let Some(frame) = self.descent_at_degree(d as u32)? {
                return Ok(frame);
            }
        }
        Err(Error::DegreeBoundExceeded { bound: cap })
    }

    fn descent_at_degree(&self, d: u32) -> Result<Option<Frame<F>>> {
        let r = self.rank;
        let monos = MultiIndex::up_to_degree(self.vars.len(), d);
        let basis = horizontal_basis(self, &monos);
        if basis.len() < r {
            return Ok(None);
        }
        let nm = monos.len();
        let n = nm * r;
        // unknown u = mono_index * r + k; term order first, then positions in
        // both directions
        let orders: [Box<dyn Fn(usize) -> usize>; 3] =
            [Box::new(|u| u), Box::new(move |u| (u % r) * nm + u / r), Box::new(move |u| (r - 1 - u % r) * nm + u / r)];
        for order in &orders {
            let mut inverse = vec![0; n];
            for u in 0..n {
                inverse[order(u)] = u;
            }
            let permuted: Vec<Vec<F>> = basis.iter().map(|v| (0..n).map(|c| v[inverse[c]]).collect()).collect();
            let echelon = echelon_by_leading(&permuted, n);
            let mut gens: Vec<(usize, Vec<F>)> = Vec::new();
            for v in echelon {
                let lead = inverse[leading_position(&v).unwrap()];
                let (m, k) = (&monos[lead / r], lead % r);
                let covered = gens.iter().any(|(g, _)| g % r == k && self.twisted_quotient(&monos[g / r], m));
                if !covered {
                    let orig: Vec<F> = (0..n).map(|u| v[order(u)]).collect();
                    gens.push((lead, orig));
                }
            }
            if gens.len() < r {
                continue;
            }
            let columns: Vec<PolyVector<F>> = gens.iter().map(|(_, v)| self.to_poly_vector(v, &monos)).collect();
            if let Some(frame) = unit_subset(&self.vars, &columns, r)? {
                return Ok(Some(frame));
            }
        }
        Ok(None)
    }

    /// `m / g` is a monomial of the twisted ring.
    fn twisted_quotient(&self, g: &MultiIndex, m: &MultiIndex) -> bool {
        let Some(q) = m.checked_sub(g) else {
            return false;
        };
        let p = F::CHARACTERISTIC;
        self.active.iter().all(|&i| q[i] % p == 0)
    }

    fn to_poly_vector(&self, v: &[F], monos: &[MultiIndex]) -> PolyVector<F> {
        let r = self.rank;
        (0..r)
            .map(|k| Poly::from_terms(&self.vars, monos.iter().enumerate().map(|(mi, m)| (m.clone(), v[mi * r + k]))))
            .collect()
    }
}

/// `F_p`-basis of the horizontal sections whose entries are supported on `monos`.
fn horizontal_basis<F: PrimeField>(c: &Connection<F>, monos: &[MultiIndex]) -> Vec<Vec<F>> {
    let r = c.rank;
    let mut rows: HashMap<(usize, usize, MultiIndex), usize> = HashMap::new();
    let mut columns = Vec::with_capacity(monos.len() * r);
    for m in monos {
        for k in 0..r {
            let mut col = Vec::new();
            let xm = Poly::monomial(&c.vars, m.clone(), F::one());
            for (i, &a) in c.active.iter().enumerate() {
                let dm = xm.partial(a);
                for row in 0..r {
                    let mut entry = c.matrices[i].get(row, k) * &xm;
                    if row == k {
                        entry = &entry + &dm;
                    }
                    for (e, &v) in entry.terms() {
                        let next = rows.len();
                        let idx = *rows.entry((i, row, e.clone())).or_insert(next);
                        col.push((idx, v));
                    }
                }
            }
            columns.push(col);
        }
    }
    kernel_of_columns(&columns, rows.len())
}

/// The first `r`-subset (lexicographic) of `columns` with unit determinant.
pub(crate) fn unit_subset<F: PrimeField>(vars: &Vars, columns: &[PolyVector<F>], r: usize) -> Result<Option<Frame<F>>> {
    const MAX_SUBSETS: usize = 512;
    let mut idx: Vec<usize> = (0..r).collect();
    let n = columns.len();
    for _ in 0..MAX_SUBSETS {
        let chosen: Vec<PolyVector<F>> = idx.iter().map(|&i| columns[i].clone()).collect();
        let g = PolyMatrix::from_columns(vars, &chosen)?;
        if let Ok(frame) = Frame::new(g) {
            return Ok(Some(frame));
        }
        // next combination
        let Some(pos) = (0..r).rev().find(|&i| idx[i] < n - r + i) else {
            return Ok(None);
        };
        idx[pos] += 1;
        for i in pos + 1..r {
            idx[i] = idx[i - 1] + 1;
        }
    }
    Ok(None)
}

/// The witness `U = H^{-1} G` that two frames of the same module agree up to
/// a unit over the twisted ring (`twist` Frobenius twists at `active`).
pub fn frame_equivalence<F: PrimeField>(
    g: &PolyMatrix<F>,
    h: &PolyMatrix<F>,
    active: &[usize],
    twist: u32,
) -> Result<Option<PolyMatrix<F>>> {
    let u = h.inverse_unit()?.checked_mul(g)?;
    if u.unit_determinant().is_err() {
        return Ok(None);
    }
    Ok(u.frobenius_root(active, twist).map(|_| u))
}
