//! Exponent vectors and operator indices.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Index};

use crate::arith::field::PrimeField;
use crate::error::{Error, Result};

/// A vector of non-negative integers: a monomial exponent or the index `n`
/// of a divided-power operator `D_n`.
///
/// The `Ord` instance is graded lexicographic: total degree first, then
/// lexicographic with the first coordinate most significant.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zero(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    /// The unit vector `e_i` scaled by `k`.
    pub fn axis(len: usize, i: usize, k: u32) -> Self {
        let mut v = vec![0; len];
        v[i] = k;
        MultiIndex(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    /// Componentwise `self <= other`.
    pub fn divides(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self - other`, `None` unless `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if !other.divides(self) {
            return None;
        }
        Some(MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()))
    }

    /// All `a` with `a <= self` componentwise, in graded-lex ascending order.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(Vec::with_capacity(self.len()))];
        for &bound in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (bound as usize + 1));
            for prefix in &out {
                for e in 0..=bound {
                    let mut v = prefix.0.clone();
                    v.push(e);
                    next.push(MultiIndex(v));
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    /// All indices of length `len` with total degree `<= max_degree`, graded-lex ascending.
    pub fn up_to_degree(len: usize, max_degree: u32) -> Vec<MultiIndex> {
        fn rec(len: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() == len {
                out.push(MultiIndex(prefix.clone()));
                return;
            }
            for e in 0..=budget {
                prefix.push(e);
                rec(len, budget - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(len, max_degree, &mut Vec::with_capacity(len), &mut out);
        out.sort();
        out
    }

    pub fn scale(&self, k: u32) -> MultiIndex {
        MultiIndex(self.0.iter().map(|e| e * k).collect())
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.len(), rhs.len(), "multi-index length mismatch");
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|e| e.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

/// `C(m, n) mod p` for `m, n < p` via the multiplicative formula.
fn small_binomial<F: PrimeField>(m: u64, n: u64) -> F {
    if n > m {
        return F::zero();
    }
    let mut num = F::one();
    let mut den = F::one();
    for i in 0..n {
        num *= F::from_u64(m - i);
        den *= F::from_u64(i + 1);
    }
    num * den.inverse().expect("n < p")
}

/// `C(m, n) mod p` by Lucas' theorem on base-`p` digits.
pub fn binomial_mod<F: PrimeField>(mut m: u64, mut n: u64) -> F {
    let p = F::CHARACTERISTIC as u64;
    let mut acc = F::one();
    while n > 0 || m > 0 {
        let (md, nd) = (m % p, n % p);
        if nd > md {
            return F::zero();
        }
        acc *= small_binomial::<F>(md, nd);
        if acc.is_zero() {
            return acc;
        }
        m /= p;
        n /= p;
    }
    acc
}

/// The multi-binomial `prod_i C(m_i, n_i) mod p`.
pub fn lucas_binomial<F: PrimeField>(m: &MultiIndex, n: &MultiIndex) -> Result<F> {
    if m.len() != n.len() {
        return Err(Error::Dimension(format!("multi-index lengths {} and {} differ", m.len(), n.len())));
    }
    Ok(multi_binomial(m, n))
}

pub(crate) fn multi_binomial<F: PrimeField>(m: &MultiIndex, n: &MultiIndex) -> F {
    let mut acc = F::one();
    for (&a, &b) in m.0.iter().zip(&n.0) {
        if b > a {
            return F::zero();
        }
        acc *= binomial_mod::<F>(a as u64, b as u64);
        if acc.is_zero() {
            break;
        }
    }
    acc
}
