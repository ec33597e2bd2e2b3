//! Matrices with polynomial entries.

use std::collections::HashMap;
use std::fmt;

use crate::arith::field::PrimeField;
use crate::arith::multi_index::MultiIndex;
use crate::arith::poly::{same_vars, Poly, Vars};
use crate::error::{Error, Result};

/// A dense `rows x cols` matrix over `F_p[vars]`, row-major.
#[derive(Clone)]
pub struct PolyMatrix<F> {
    vars: Vars,
    rows: usize,
    cols: usize,
    entries: Vec<Poly<F>>,
}

impl<F: PrimeField> PartialEq for PolyMatrix<F> {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows && self.cols == other.cols && self.entries == other.entries
    }
}

impl<F: PrimeField> Eq for PolyMatrix<F> {}

/// A column vector of polynomials.
pub type PolyVector<F> = Vec<Poly<F>>;

impl<F: PrimeField> PolyMatrix<F> {
    pub fn zero(vars: &Vars, rows: usize, cols: usize) -> Self {
        PolyMatrix { vars: vars.clone(), rows, cols, entries: vec![Poly::zero(vars); rows * cols] }
    }

    pub fn identity(vars: &Vars, n: usize) -> Self {
        let mut m = Self::zero(vars, n, n);
        for i in 0..n {
            m.entries[i * n + i] = Poly::one(vars);
        }
        m
    }

    pub fn from_rows(vars: &Vars, rows: Vec<Vec<Poly<F>>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut entries = Vec::with_capacity(nrows * ncols);
        for row in rows {
            if row.len() != ncols {
                return Err(Error::Dimension("ragged matrix rows".into()));
            }
            for p in row {
                if !same_vars(p.vars(), vars) {
                    return Err(Error::Dimension("matrix entry over different variables".into()));
                }
                entries.push(p);
            }
        }
        Ok(PolyMatrix { vars: vars.clone(), rows: nrows, cols: ncols, entries })
    }

    pub fn from_columns(vars: &Vars, cols: &[PolyVector<F>]) -> Result<Self> {
        let ncols = cols.len();
        let nrows = cols.first().map_or(0, |c| c.len());
        let mut m = Self::zero(vars, nrows, ncols);
        for (j, col) in cols.iter().enumerate() {
            if col.len() != nrows {
                return Err(Error::Dimension("columns of different lengths".into()));
            }
            for (i, p) in col.iter().enumerate() {
                m.set(i, j, p.clone());
            }
        }
        Ok(m)
    }

    /// Parse a row-major matrix of polynomial strings.
    pub fn parse(vars: &Vars, rows: &[Vec<String>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| Poly::parse(s, vars)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(vars, parsed)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly<F> {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, p: Poly<F>) {
        self.entries[i * self.cols + j] = p;
    }

    pub fn entries(&self) -> &[Poly<F>] {
        &self.entries
    }

    pub fn column(&self, j: usize) -> PolyVector<F> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn columns(&self) -> Vec<PolyVector<F>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).to_string()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|p| p.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == Self::identity(&self.vars, self.rows)
    }

    /// Largest total degree of an entry, `None` for the zero matrix.
    pub fn max_degree(&self) -> Option<u32> {
        self.entries.iter().filter_map(|p| p.degree()).max()
    }

    pub fn map<G: Fn(&Poly<F>) -> Poly<F>>(&self, f: G) -> Self {
        PolyMatrix {
            vars: self.vars.clone(),
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<G: Fn(&Poly<F>) -> Option<Poly<F>>>(&self, f: G) -> Option<Self> {
        let entries = self.entries.iter().map(f).collect::<Option<Vec<_>>>()?;
        Some(PolyMatrix { vars: self.vars.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn scale(&self, c: F) -> Self {
        self.map(|p| p.scale(c))
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zero(&self.vars, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("matrix shapes differ".into()));
        }
        let entries =
            self.entries.iter().zip(&other.entries).map(|(a, b)| a.checked_add(b)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { vars: self.vars.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(-F::one()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        if !same_vars(&self.vars, &other.vars) {
            return Err(Error::Dimension("matrices over different variables".into()));
        }
        let mut m = Self::zero(&self.vars, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = i * m.cols + j;
                    m.entries[idx] = &m.entries[idx] + &(a * b);
                }
            }
        }
        Ok(m)
    }

    pub fn mul_vec(&self, v: &[Poly<F>]) -> Result<PolyVector<F>> {
        if v.len() != self.cols {
            return Err(Error::Dimension("vector length does not match matrix".into()));
        }
        let mut out = vec![Poly::zero(&self.vars); self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            for (k, vk) in v.iter().enumerate() {
                let a = self.get(i, k);
                if a.is_zero() || vk.is_zero() {
                    continue;
                }
                *slot = &*slot + &a.checked_mul(vk)?;
            }
        }
        Ok(out)
    }

    /// Kronecker product; rows and columns of `self` are the slow indices.
    pub fn kronecker(&self, other: &Self) -> Result<Self> {
        if !same_vars(&self.vars, &other.vars) {
            return Err(Error::Dimension("matrices over different variables".into()));
        }
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut m = Self::zero(&self.vars, r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        m.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        Ok(m)
    }

    /// Re-express every entry over another variable list.
    pub fn embed(&self, target: &Vars) -> Result<Self> {
        let entries = self.entries.iter().map(|p| p.embed(target)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { vars: target.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn frobenius_at(&self, positions: &[usize], times: u32) -> Self {
        self.map(|p| p.frobenius_at(positions, times))
    }

    pub fn frobenius_root(&self, positions: &[usize], times: u32) -> Option<Self> {
        self.try_map(|p| p.frobenius_root(positions, times))
    }

    pub fn divided_derivative(&self, positions: &[usize], n: &MultiIndex) -> Self {
        self.map(|p| p.divided_derivative(positions, n))
    }

    pub fn partial(&self, position: usize) -> Self {
        self.map(|p| p.partial(position))
    }

    pub fn eval_partial(&self, assignments: &[(&str, F)]) -> Result<Self> {
        let entries = self.entries.iter().map(|p| p.eval_partial(assignments)).collect::<Result<Vec<_>>>()?;
        Ok(PolyMatrix { vars: self.vars.clone(), rows: self.rows, cols: self.cols, entries })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut m = Self::zero(&self.vars, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                m.set(a, b, self.get(i, j).clone());
            }
        }
        m
    }

    /// Determinant by expansion over column subsets, `O(n 2^n)` products.
    pub fn det(&self) -> Result<Poly<F>> {
        if !self.is_square() {
            return Err(Error::Dimension("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Poly::one(&self.vars));
        }
        // minors[mask] = det of rows 0..popcount(mask) against the columns in mask
        let mut minors: HashMap<u32, Poly<F>> = HashMap::new();
        minors.insert(0, Poly::one(&self.vars));
        for k in 0..n {
            let mut next: HashMap<u32, Poly<F>> = HashMap::new();
            for (&mask, minor) in &minors {
                if minor.is_zero() {
                    continue;
                }
                // Laplace along row k over the columns not yet used, sign by
                // the number of used columns to the right of j.
                for j in 0..n {
                    if mask & (1 << j) != 0 {
                        continue;
                    }
                    let a = self.get(k, j);
                    if a.is_zero() {
                        continue;
                    }
                    let above = (mask >> j).count_ones();
                    let term = a * minor;
                    let term = if above % 2 == 1 { -&term } else { term };
                    let slot = next.entry(mask | (1 << j)).or_insert_with(|| Poly::zero(&self.vars));
                    *slot = &*slot + &term;
                }
            }
            minors = next;
        }
        Ok(minors.remove(&((1u32 << n) - 1)).unwrap_or_else(|| Poly::zero(&self.vars)))
    }

    /// Classical adjugate: `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Dimension("adjugate of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut adj = Self::zero(&self.vars, n, n);
        if n == 1 {
            adj.set(0, 0, Poly::one(&self.vars));
            return Ok(adj);
        }
        for i in 0..n {
            for j in 0..n {
                let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
                let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
                let minor = self.submatrix(&rows, &cols).det()?;
                let cof = if (i + j) % 2 == 1 { -&minor } else { minor };
                adj.set(i, j, cof);
            }
        }
        Ok(adj)
    }

    /// The determinant if it is a nonzero constant.
    pub fn unit_determinant(&self) -> Result<F> {
        let d = self.det()?;
        match d.constant_value() {
            Some(c) if !c.is_zero() => Ok(c),
            _ => Err(Error::Invertibility { determinant: d.to_string() }),
        }
    }

    /// Exact inverse of a matrix whose determinant is a nonzero constant.
    pub fn inverse_unit(&self) -> Result<Self> {
        let d = self.unit_determinant()?;
        Ok(self.adjugate()?.scale(d.inverse().unwrap()))
    }
}

impl<F: PrimeField> fmt::Display for PolyMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                let cells: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", cells.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

impl<F: PrimeField> fmt::Debug for PolyMatrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::field::Fp;
    use crate::arith::poly::vars_from;

    type F3 = Fp<3>;

    fn m(vars: &Vars, rows: &[&[&str]]) -> PolyMatrix<F3> {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        PolyMatrix::parse(vars, &rows).unwrap()
    }

    #[test]
    fn determinant_and_inverse() {
        let v = vars_from(&["x"]);
        let a = m(&v, &[&["1", "x", "0"], &["0", "1", "x^2"], &["0", "0", "2"]]);
        assert_eq!(a.det().unwrap(), Poly::constant(&v, F3::new(2)));
        let inv = a.inverse_unit().unwrap();
        assert!(a.checked_mul(&inv).unwrap().is_identity());
        assert!(inv.checked_mul(&a).unwrap().is_identity());
    }

    #[test]
    fn determinant_signs() {
        let v = vars_from(&["x"]);
        let a = m(&v, &[&["0", "1"], &["1", "0"]]);
        assert_eq!(a.det().unwrap(), Poly::constant(&v, F3::new(2)));
        let b = m(&v, &[&["0", "0", "1"], &["0", "1", "0"], &["1", "0", "0"]]);
        assert_eq!(b.det().unwrap(), Poly::constant(&v, F3::new(2)));
        let c = m(&v, &[&["x", "1"], &["1", "x"]]);
        assert_eq!(c.det().unwrap(), Poly::parse("x^2 + 2", &v).unwrap());
    }

    #[test]
    fn non_unit_determinant_rejected() {
        let v = vars_from(&["x"]);
        let a = m(&v, &[&["x", "0"], &["0", "1"]]);
        assert!(matches!(a.inverse_unit(), Err(Error::Invertibility { .. })));
    }

    #[test]
    fn kronecker_shape() {
        let v = vars_from(&["x"]);
        let a = m(&v, &[&["1", "x"], &["0", "1"]]);
        let b = m(&v, &[&["2"]]);
        let k = a.kronecker(&b).unwrap();
        assert_eq!(k, a.scale(F3::new(2)));
        let k2 = a.kronecker(&a).unwrap();
        assert_eq!((k2.nrows(), k2.ncols()), (4, 4));
        assert_eq!(k2.det().unwrap(), Poly::one(&v));
    }
}
