//! Level-truncated stratifications on free modules.
//!
//! A stratification of level `λ` records, for each active variable `a` and
//! each `c < p^λ`, the matrix `Θ_{c,a}` whose columns are `∇(D_{c e_a})(e_j)`.
//! On an arbitrary vector the divided-power Leibniz rule gives
//! `∇(D_{c e_a}) v = Σ_{i+j=c} Θ_{j,a} D_{i e_a}(v)`, and a general index
//! acts as the commuting product of its axis parts.

use crate::arith::field::PrimeField;
use crate::arith::multi_index::{binomial_mod, MultiIndex};
use crate::arith::poly::{same_vars, Poly, Vars};
use crate::connection::Connection;
use crate::diffop::DiffOperator;
use crate::error::{Error, Result};
use crate::linalg::matrix::{PolyMatrix, PolyVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratification<F: PrimeField> {
    vars: Vars,
    active: Vec<usize>,
    rank: usize,
    level: u32,
    theta: Vec<Vec<PolyMatrix<F>>>,
}

pub(crate) fn p_power<F: PrimeField>(level: u32) -> usize {
    (F::CHARACTERISTIC as usize).pow(level)
}

impl<F: PrimeField> Stratification<F> {
    /// Assemble from axis matrices; `theta[a][c]` for `c < p^level`, with
    /// `theta[a][0]` the identity.
    pub fn from_axis_matrices(
        vars: &Vars,
        active: &[usize],
        rank: usize,
        level: u32,
        theta: Vec<Vec<PolyMatrix<F>>>,
    ) -> Result<Self> {
        let q = p_power::<F>(level);
        if theta.len() != active.len() {
            return Err(Error::Dimension("one list of axis matrices per active variable".into()));
        }
        for axis in &theta {
            if axis.len() != q {
                return Err(Error::Dimension(format!("expected {q} axis matrices per variable")));
            }
            for m in axis {
                if m.nrows() != rank || !m.is_square() || !same_vars(m.vars(), vars) {
                    return Err(Error::Dimension("axis matrix has the wrong shape".into()));
                }
            }
            if !axis[0].is_identity() {
                return Err(Error::Validation("D_0 must act as the identity".into()));
            }
        }
        Ok(Stratification { vars: vars.clone(), active: active.to_vec(), rank, level, theta })
    }

    /// The stratification of level `level` carried by a frame `G` whose
    /// columns are horizontal up to that level: `Θ_{c,a} = G D_{c e_a}(G^{-1})`.
    pub fn from_frame(g: &PolyMatrix<F>, active: &[usize], level: u32) -> Result<Self> {
        let g_inv = g.inverse_unit()?;
        let q = p_power::<F>(level);
        let len = active.len();
        let theta = (0..len)
            .map(|a| {
                (0..q)
                    .map(|c| {
                        let n = MultiIndex::axis(len, a, c as u32);
                        g.checked_mul(&g_inv.divided_derivative(active, &n))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_axis_matrices(g.vars(), active, g.nrows(), level, theta)
    }

    /// The level-1 stratification of a flat connection with vanishing
    /// p-curvature: `Θ_{c,a} = ∇(∂_a)^c / c!` for `c < p`.
    pub fn from_connection(c: &Connection<F>) -> Result<Self> {
        let obstruction = |e: Error| Error::StratificationObstruction { level: 0, reason: e.to_string() };
        c.check_p_flat().map_err(obstruction)?;
        let p = F::CHARACTERISTIC as usize;
        let theta = (0..c.active().len())
            .map(|a| {
                let mut out = vec![PolyMatrix::identity(c.vars(), c.rank())];
                for k in 1..p {
                    let next = c.apply_matrix(a, &out[k - 1])?;
                    let inv = F::from_u64(k as u64).inverse().unwrap();
                    out.push(next.scale(inv));
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_axis_matrices(c.vars(), c.active(), c.rank(), 1, theta)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// `Θ_{c,a}`.
    pub fn axis_matrix(&self, a: usize, c: usize) -> &PolyMatrix<F> {
        &self.theta[a][c]
    }

    fn check_order(&self, c: usize) -> Result<()> {
        let limit = p_power::<F>(self.level);
        if c >= limit {
            return Err(Error::LevelExceeded { order: c, limit });
        }
        Ok(())
    }

    /// `∇(D_{c e_a})` applied to each column of `m`.
    pub fn axis_action_matrix(&self, a: usize, c: usize, m: &PolyMatrix<F>) -> Result<PolyMatrix<F>> {
        self.check_order(c)?;
        let len = self.active.len();
        let mut acc = PolyMatrix::zero(&self.vars, self.rank, m.ncols());
        for j in 0..=c {
            let d = m.divided_derivative(&self.active, &MultiIndex::axis(len, a, (c - j) as u32));
            if d.is_zero() {
                continue;
            }
            acc = acc.checked_add(&self.theta[a][j].checked_mul(&d)?)?;
        }
        Ok(acc)
    }

    /// `∇(D_{c e_a})(x^m e_k)`, without forming the input vector.
    pub fn axis_action_on_basis(&self, a: usize, c: usize, m: &MultiIndex, k: usize) -> Result<PolyVector<F>> {
        self.check_order(c)?;
        let pos = self.active[a];
        let mut acc = vec![Poly::zero(&self.vars); self.rank];
        for j in 0..=c {
            let i = (c - j) as u32;
            if i > m[pos] {
                continue;
            }
            let b: F = binomial_mod(m[pos] as u64, i as u64);
            if b.is_zero() {
                continue;
            }
            let mut e = m.as_slice().to_vec();
            e[pos] -= i;
            let mono = MultiIndex::new(e);
            let theta = &self.theta[a][j];
            for (row, slot) in acc.iter_mut().enumerate() {
                let t = theta.get(row, k);
                if !t.is_zero() {
                    *slot = &*slot + &t.mul_monomial(&mono, b);
                }
            }
        }
        Ok(acc)
    }

    /// `∇(D_n) v` for an index over the active variables, `|n| < p^level`.
    pub fn action(&self, n: &MultiIndex, v: &[Poly<F>]) -> Result<PolyVector<F>> {
        if n.len() != self.active.len() {
            return Err(Error::Dimension("operator index length does not match active variables".into()));
        }
        if v.len() != self.rank {
            return Err(Error::Dimension("vector length does not match rank".into()));
        }
        self.check_order(n.degree() as usize)?;
        let mut m = PolyMatrix::from_columns(&self.vars, &[v.to_vec()])?;
        for a in 0..n.len() {
            if n[a] > 0 {
                m = self.axis_action_matrix(a, n[a] as usize, &m)?;
            }
        }
        Ok(m.column(0))
    }

    /// `∇(P) v = Σ_n a_n ∇(D_n) v` for an operator in left normal form.
    pub fn apply_operator(&self, op: &DiffOperator<F>, v: &[Poly<F>]) -> Result<PolyVector<F>> {
        if op.active() != self.active.as_slice() || !same_vars(op.vars(), &self.vars) {
            return Err(Error::Dimension("operator and stratification over different variables".into()));
        }
        let mut acc = vec![Poly::zero(&self.vars); self.rank];
        for (n, a) in op.terms() {
            let img = self.action(n, v)?;
            for (slot, x) in acc.iter_mut().zip(img) {
                *slot = &*slot + &(a * &x);
            }
        }
        Ok(acc)
    }
}
