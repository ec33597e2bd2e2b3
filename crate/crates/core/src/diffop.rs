//! Divided-power differential operators in coordinates.
//!
//! An operator is a finite sum `sum_n a_n D_n` with polynomial coefficients
//! on the left. The indices `n` range over the *active* variables; all other
//! variables are constants for the operator.

use std::collections::BTreeMap;
use std::fmt;

use crate::arith::field::PrimeField;
use crate::arith::multi_index::{multi_binomial, MultiIndex};
use crate::arith::poly::{accumulate, same_vars, var_index, Poly, Vars};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct DiffOperator<F: PrimeField> {
    vars: Vars,
    active: Vec<usize>,
    terms: BTreeMap<MultiIndex, Poly<F>>,
}

impl<F: PrimeField> DiffOperator<F> {
    pub fn zero(vars: &Vars, active: &[usize]) -> Self {
        DiffOperator { vars: vars.clone(), active: active.to_vec(), terms: BTreeMap::new() }
    }

    /// Resolve active variable names to positions.
    pub fn active_positions(vars: &Vars, names: &[&str]) -> Result<Vec<usize>> {
        names.iter().map(|n| var_index(vars, n)).collect()
    }

    /// The basis operator `D_n`.
    pub fn basis(vars: &Vars, active: &[usize], n: MultiIndex) -> Self {
        Self::term(Poly::one(vars), active, n)
    }

    /// `a * D_n`.
    pub fn term(a: Poly<F>, active: &[usize], n: MultiIndex) -> Self {
        assert_eq!(n.len(), active.len(), "operator index length mismatch");
        let mut op = Self::zero(a.vars(), active);
        if !a.is_zero() {
            op.terms.insert(n, a);
        }
        op
    }

    /// Multiplication by `a`, the operator `a * D_0`.
    pub fn multiplication(a: Poly<F>, active: &[usize]) -> Self {
        let n = MultiIndex::zero(active.len());
        Self::term(a, active, n)
    }

    pub fn identity(vars: &Vars, active: &[usize]) -> Self {
        Self::multiplication(Poly::one(vars), active)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Poly<F>)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, n: &MultiIndex) -> Poly<F> {
        self.terms.get(n).cloned().unwrap_or_else(|| Poly::zero(&self.vars))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `max |n|` over stored terms; `None` for the zero operator.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|n| n.degree()).max()
    }

    fn compatible(&self, other: &Self) -> Result<()> {
        if !same_vars(&self.vars, &other.vars) || self.active != other.active {
            return Err(Error::Dimension("operators over different variables".into()));
        }
        Ok(())
    }

    fn add_term(&mut self, n: MultiIndex, a: Poly<F>) {
        if a.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&n) {
            Some(old) => &old + &a,
            None => a,
        };
        if !sum.is_zero() {
            self.terms.insert(n, sum);
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (n, a) in &other.terms {
            out.add_term(n.clone(), a.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(-F::one()))
    }

    pub fn scale(&self, c: F) -> Self {
        let mut out = Self::zero(&self.vars, &self.active);
        for (n, a) in &self.terms {
            out.add_term(n.clone(), a.scale(c));
        }
        out
    }

    /// Left multiplication by a polynomial.
    pub fn mul_left(&self, f: &Poly<F>) -> Result<Self> {
        let mut out = Self::zero(&self.vars, &self.active);
        for (n, a) in &self.terms {
            out.add_term(n.clone(), f.checked_mul(a)?);
        }
        Ok(out)
    }

    /// Apply to a polynomial: `sum_n a_n D_n(f)`.
    pub fn apply(&self, f: &Poly<F>) -> Result<Poly<F>> {
        if !same_vars(&self.vars, f.vars()) {
            return Err(Error::Dimension("operator and polynomial over different variables".into()));
        }
        let mut acc = Poly::zero(&self.vars);
        for (n, a) in &self.terms {
            let d = f.divided_derivative(&self.active, n);
            if !d.is_zero() {
                acc = &acc + &(a * &d);
            }
        }
        Ok(acc)
    }

    /// `self ∘ other`, renormalized to left form. A coefficient `b` of
    /// `other` passes through `D_m` by the divided-power Leibniz rule, then
    /// `D_j D_n = C(j + n, n) D_(j+n)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.compatible(other)?;
        let mut acc: BTreeMap<MultiIndex, BTreeMap<MultiIndex, F>> = BTreeMap::new();
        for (m, a) in &self.terms {
            for i in m.sub_indices() {
                let j = m.checked_sub(&i).unwrap();
                for (n, b) in &other.terms {
                    let db = b.divided_derivative(&self.active, &i);
                    if db.is_zero() {
                        continue;
                    }
                    let jn = &j + n;
                    let c: F = multi_binomial(&jn, n);
                    if c.is_zero() {
                        continue;
                    }
                    let prod = a * &db;
                    let slot = acc.entry(jn).or_default();
                    for (e, &v) in prod.terms() {
                        accumulate(slot, e.clone(), v * c);
                    }
                }
            }
        }
        let mut out = Self::zero(&self.vars, &self.active);
        for (n, terms) in acc {
            out.add_term(n, Poly::from_terms(&self.vars, terms));
        }
        Ok(out)
    }

    /// The commutator `[self, t_a] = self ∘ a - a ∘ self`.
    pub fn commutator_with_mult(&self, a: &Poly<F>) -> Result<Self> {
        let ta = Self::multiplication(a.clone(), &self.active);
        self.compose(&ta)?.checked_sub(&ta.compose(self)?)
    }

    /// `self^k` under composition.
    pub fn power(&self, k: u32) -> Result<Self> {
        let mut acc = Self::identity(&self.vars, &self.active);
        for _ in 0..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }
}

impl<F: PrimeField> fmt::Display for DiffOperator<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(n, a)| {
                let idx: Vec<String> = n.as_slice().iter().map(|e| e.to_string()).collect();
                let d = format!("D[{}]", idx.join(","));
                if a.constant_value() == Some(F::one()) {
                    d
                } else if a.num_terms() == 1 {
                    format!("{a}*{d}")
                } else {
                    format!("({a})*{d}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<F: PrimeField> fmt::Debug for DiffOperator<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}
