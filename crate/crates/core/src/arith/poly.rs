//! Sparse multivariate polynomials over `F_p`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::arith::field::PrimeField;
use crate::arith::multi_index::{multi_binomial, MultiIndex};
use crate::error::{Error, Result};

/// An ordered list of variable names shared by a family of polynomials.
pub type Vars = Arc<[String]>;

pub fn vars_from<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect::<Vec<_>>().into()
}

pub(crate) fn same_vars(a: &Vars, b: &Vars) -> bool {
    Arc::ptr_eq(a, b) || a[..] == b[..]
}

/// A polynomial in `vars` with coefficients in `F`.
///
/// Terms are kept in a map keyed by exponent with no zero coefficients, so
/// structural equality is polynomial equality. Iteration runs in graded-lex
/// ascending order.
#[derive(Clone)]
pub struct Poly<F> {
    vars: Vars,
    terms: BTreeMap<MultiIndex, F>,
}

impl<F: PrimeField> PartialEq for Poly<F> {
    fn eq(&self, other: &Self) -> bool {
        same_vars(&self.vars, &other.vars) && self.terms == other.terms
    }
}

impl<F: PrimeField> Eq for Poly<F> {}

impl<F: PrimeField> Poly<F> {
    pub fn zero(vars: &Vars) -> Self {
        Poly { vars: vars.clone(), terms: BTreeMap::new() }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, F::one())
    }

    pub fn constant(vars: &Vars, c: F) -> Self {
        Self::monomial(vars, MultiIndex::zero(vars.len()), c)
    }

    pub fn monomial(vars: &Vars, exponent: MultiIndex, c: F) -> Self {
        assert_eq!(exponent.len(), vars.len(), "exponent length does not match variables");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        Poly { vars: vars.clone(), terms }
    }

    /// The coordinate function named `name`.
    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let i = var_index(vars, name)?;
        Ok(Self::monomial(vars, MultiIndex::axis(vars.len(), i, 1), F::one()))
    }

    pub fn from_terms<I: IntoIterator<Item = (MultiIndex, F)>>(vars: &Vars, terms: I) -> Self {
        let mut map: BTreeMap<MultiIndex, F> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length does not match variables");
            accumulate(&mut map, e, c);
        }
        Poly { vars: vars.clone(), terms: map }
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &F)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &MultiIndex) -> F {
        self.terms.get(e).copied().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` when the polynomial is the constant `c` (including zero).
    pub fn constant_value(&self) -> Option<F> {
        match self.terms.len() {
            0 => Some(F::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.is_zero().then_some(*c)
            }
            _ => None,
        }
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|e| e.degree())
    }

    /// Total degree in the variables at `positions`.
    pub fn degree_in(&self, positions: &[usize]) -> Option<u32> {
        self.terms.keys().map(|e| positions.iter().map(|&i| e[i]).sum()).max()
    }

    /// Leading term in graded-lex order.
    pub fn leading(&self) -> Option<(&MultiIndex, &F)> {
        self.terms.iter().next_back()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if same_vars(&self.vars, &other.vars) {
            Ok(())
        } else {
            Err(Error::Dimension(format!("variable lists {:?} and {:?} differ", &self.vars[..], &other.vars[..])))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            accumulate(&mut terms, e.clone(), *c);
        }
        Ok(Poly { vars: self.vars.clone(), terms })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            accumulate(&mut terms, e.clone(), -*c);
        }
        Ok(Poly { vars: self.vars.clone(), terms })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(&self.vars));
        }
        let mut acc: HashMap<MultiIndex, F> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                let entry = acc.entry(e).or_insert_with(F::zero);
                *entry += *ca * *cb;
            }
        }
        Ok(Poly { vars: self.vars.clone(), terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() })
    }

    pub fn scale(&self, c: F) -> Self {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, &v)| (e.clone(), v * c)).collect() }
    }

    /// Multiply by the monomial `c * x^e`.
    pub fn mul_monomial(&self, e: &MultiIndex, c: F) -> Self {
        if c.is_zero() {
            return Poly::zero(&self.vars);
        }
        Poly { vars: self.vars.clone(), terms: self.terms.iter().map(|(m, &v)| (m + e, v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Poly::one(&self.vars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute values for some variables. The variable list is kept; the
    /// substituted variables simply no longer occur.
    pub fn eval_partial(&self, assignments: &[(&str, F)]) -> Result<Self> {
        let mut idx = Vec::with_capacity(assignments.len());
        for (name, value) in assignments {
            idx.push((var_index(&self.vars, name)?, *value));
        }
        let mut terms = BTreeMap::new();
        for (e, &c) in &self.terms {
            let mut e2 = e.as_slice().to_vec();
            let mut c2 = c;
            for &(i, v) in &idx {
                c2 *= v.pow_u64(e2[i] as u64);
                e2[i] = 0;
            }
            accumulate(&mut terms, MultiIndex::new(e2), c2);
        }
        Ok(Poly { vars: self.vars.clone(), terms })
    }

    /// Evaluate at a full point given in variable order.
    pub fn eval(&self, point: &[F]) -> F {
        assert_eq!(point.len(), self.vars.len());
        let mut acc = F::zero();
        for (e, &c) in &self.terms {
            let mut t = c;
            for (i, &x) in point.iter().enumerate() {
                t *= x.pow_u64(e[i] as u64);
            }
            acc += t;
        }
        acc
    }

    /// The relative Frobenius on coordinates: `x_i -> x_i^p` for each twisted
    /// variable, coefficients unchanged.
    pub fn frobenius_substitute(&self, twist_vars: &[&str]) -> Result<Self> {
        let mut positions = Vec::with_capacity(twist_vars.len());
        for v in twist_vars {
            positions.push(var_index(&self.vars, v)?);
        }
        Ok(self.frobenius_at(&positions, 1))
    }

    /// Apply the Frobenius twist `times` times on the given positions.
    pub fn frobenius_at(&self, positions: &[usize], times: u32) -> Self {
        if times == 0 || positions.is_empty() {
            return self.clone();
        }
        let q = F::CHARACTERISTIC.pow(times);
        Poly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| {
                    let mut v = e.as_slice().to_vec();
                    for &i in positions {
                        v[i] *= q;
                    }
                    (MultiIndex::new(v), c)
                })
                .collect(),
        }
    }

    /// Inverse of [`Poly::frobenius_at`]: divide the exponents at `positions`
    /// by `p^times`. `None` if some exponent is not divisible.
    pub fn frobenius_root(&self, positions: &[usize], times: u32) -> Option<Self> {
        if times == 0 || positions.is_empty() {
            return Some(self.clone());
        }
        let q = F::CHARACTERISTIC.pow(times);
        let mut terms = BTreeMap::new();
        for (e, &c) in &self.terms {
            let mut v = e.as_slice().to_vec();
            for &i in positions {
                if v[i] % q != 0 {
                    return None;
                }
                v[i] /= q;
            }
            terms.insert(MultiIndex::new(v), c);
        }
        Some(Poly { vars: self.vars.clone(), terms })
    }

    /// `D_n` applied to this polynomial, where `n` indexes the variables at
    /// `positions`: `D_n(x^m) = C(m, n) x^(m - n)`.
    pub fn divided_derivative(&self, positions: &[usize], n: &MultiIndex) -> Self {
        assert_eq!(positions.len(), n.len(), "operator index length mismatch");
        if n.is_zero() {
            return self.clone();
        }
        let mut terms = BTreeMap::new();
        for (e, &c) in &self.terms {
            let sub = MultiIndex::new(positions.iter().map(|&i| e[i]).collect());
            if !n.divides(&sub) {
                continue;
            }
            let b: F = multi_binomial(&sub, n);
            if b.is_zero() {
                continue;
            }
            let mut v = e.as_slice().to_vec();
            for (k, &i) in positions.iter().enumerate() {
                v[i] -= n[k];
            }
            accumulate(&mut terms, MultiIndex::new(v), c * b);
        }
        Poly { vars: self.vars.clone(), terms }
    }

    /// First partial derivative in the variable at `position`.
    pub fn partial(&self, position: usize) -> Self {
        self.divided_derivative(&[position], &MultiIndex::new(vec![1]))
    }

    /// Re-express in a different variable list, matching by name. Fails if a
    /// variable that actually occurs is missing from `target`.
    pub fn embed(&self, target: &Vars) -> Result<Self> {
        if same_vars(&self.vars, target) {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, name) in self.vars.iter().enumerate() {
            let pos = target.iter().position(|t| t == name);
            let used = self.terms.keys().any(|e| e[i] > 0);
            if pos.is_none() && used {
                return Err(Error::Name(name.clone()));
            }
            map.push(pos);
        }
        let mut terms = BTreeMap::new();
        for (e, &c) in &self.terms {
            let mut v = vec![0; target.len()];
            for (i, slot) in map.iter().enumerate() {
                if let Some(j) = slot {
                    v[*j] += e[i];
                }
            }
            accumulate(&mut terms, MultiIndex::new(v), c);
        }
        Ok(Poly { vars: target.clone(), terms })
    }

    /// Parse the textual form, e.g. `1 + 2*x1^3*s`.
    pub fn parse(input: &str, vars: &Vars) -> Result<Self> {
        Parser { src: input.as_bytes(), pos: 0 }.parse::<F>(vars)
    }
}

pub(crate) fn accumulate<F: PrimeField>(map: &mut BTreeMap<MultiIndex, F>, e: MultiIndex, c: F) {
    if c.is_zero() {
        return;
    }
    match map.entry(e) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = *o.get() + c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

pub fn var_index(vars: &Vars, name: &str) -> Result<usize> {
    vars.iter().position(|v| v == name).ok_or_else(|| Error::Name(name.to_string()))
}

impl<F: PrimeField> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut factors: Vec<String> = Vec::new();
            for (i, &k) in e.as_slice().iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(self.vars[i].clone()),
                    _ => factors.push(format!("{}^{}", self.vars[i], k)),
                }
            }
            if factors.is_empty() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", c, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<F: PrimeField> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl<F: PrimeField> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, rhs: &Poly<F>) -> Poly<F> {
        self.checked_add(rhs).expect("polynomials over different variables")
    }
}

impl<F: PrimeField> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, rhs: &Poly<F>) -> Poly<F> {
        self.checked_sub(rhs).expect("polynomials over different variables")
    }
}

impl<F: PrimeField> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, rhs: &Poly<F>) -> Poly<F> {
        self.checked_mul(rhs).expect("polynomials over different variables")
    }
}

impl<F: PrimeField> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        self.scale(-F::one())
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse { position: self.pos, message: message.into() }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| Error::Parse { position: start, message: "number too large".into() })
    }

    fn ident(&mut self) -> Result<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a variable name"));
        }
        Ok(String::from_utf8(self.src[start..self.pos].to_vec()).unwrap())
    }

    fn parse<F: PrimeField>(mut self, vars: &Vars) -> Result<Poly<F>> {
        let mut terms: BTreeMap<MultiIndex, F> = BTreeMap::new();
        loop {
            let (e, c) = self.term::<F>(vars)?;
            accumulate(&mut terms, e, c);
            match self.peek() {
                None => break,
                Some(b'+') => self.pos += 1,
                Some(_) => return Err(self.err("expected '+' or end of input")),
            }
        }
        Ok(Poly { vars: vars.clone(), terms })
    }

    fn term<F: PrimeField>(&mut self, vars: &Vars) -> Result<(MultiIndex, F)> {
        let mut c = F::one();
        let mut e = vec![0u32; vars.len()];
        loop {
            match self.peek() {
                Some(b) if b.is_ascii_digit() => {
                    let at = self.pos;
                    let n = self.number()?;
                    if n >= F::CHARACTERISTIC as u64 {
                        return Err(Error::Parse {
                            position: at,
                            message: format!("coefficient {n} is not a residue mod {}", F::CHARACTERISTIC),
                        });
                    }
                    c *= F::from_u64(n);
                }
                Some(b) if b.is_ascii_alphabetic() || b == b'_' => {
                    let at = self.pos;
                    let name = self.ident()?;
                    let i = vars
                        .iter()
                        .position(|v| *v == name)
                        .ok_or_else(|| Error::Parse { position: at, message: format!("unknown variable '{name}'") })?;
                    let mut k = 1;
                    if self.peek() == Some(b'^') {
                        self.pos += 1;
                        k = u32::try_from(self.number()?).map_err(|_| self.err("exponent too large"))?;
                    }
                    e[i] += k;
                }
                _ => return Err(self.err("expected a coefficient or variable")),
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((MultiIndex::new(e), c))
    }
}
