//! Stratified bundles presented as Frobenius towers.
//!
//! A tower of length `ℓ` is a list of unit-determinant matrices
//! `S_0, …, S_{ℓ-1}`. With `φ` the Frobenius twist on the twisted variables
//! (all variables for absolute towers, fiber variables for relative ones) the
//! composite frame is `G_ℓ = S_0 φ(S_1) ⋯ φ^{ℓ-1}(S_{ℓ-1})`; its columns are
//! horizontal for every `D_n` with `|n| < p^ℓ`, and
//! `∇(D_n) v = G_ℓ D_n(G_ℓ^{-1} v)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::field::PrimeField;
use crate::arith::multi_index::MultiIndex;
use crate::arith::poly::{Poly, Vars};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::linalg::fp::{echelon_by_leading, kernel_of_columns};
use crate::linalg::matrix::{PolyMatrix, PolyVector};
use crate::stratification::{p_power, Stratification};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    /// Frobenius twists every variable.
    Absolute,
    /// Frobenius twists the fiber variables only.
    Relative,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Absolute => "absolute",
            Mode::Relative => "relative",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(Mode::Absolute),
            "relative" => Ok(Mode::Relative),
            other => Err(Error::Validation(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower<F: PrimeField> {
    fiber_vars: Vec<String>,
    base_vars: Vec<String>,
    vars: Vars,
    mode: Mode,
    rank: usize,
    sigmas: Vec<PolyMatrix<F>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport<F: PrimeField> {
    pub checks: Vec<ValidationCheck>,
    pub composite_frame: PolyMatrix<F>,
}

/// `F_p`-basis of the sections of degree at most `degree_cap` killed by all
/// `∇(D_n)` with `0 < |n| < p^level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedH0<F: PrimeField> {
    pub level: u32,
    pub degree_cap: u32,
    pub basis: Vec<PolyVector<F>>,
}

impl<F: PrimeField> TruncatedH0<F> {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Truncated `H^0` at the first level with `p^level > degree_cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H0Str<F: PrimeField> {
    pub dimension: usize,
    pub level: u32,
    pub degree_cap: u32,
    pub basis: Vec<PolyVector<F>>,
}

/// A chain `H_0, …, H_ℓ` with `H_i S_i^b = S_i^a φ(H_{i+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeWitness<F: PrimeField> {
    pub chain: Vec<PolyMatrix<F>>,
    pub degree: usize,
}

fn join_vars(fiber: &[String], base: &[String]) -> Result<Vars> {
    let mut seen = std::collections::HashSet::new();
    for v in fiber.iter().chain(base) {
        if !seen.insert(v.as_str()) {
            return Err(Error::Name(format!("variable {v} listed twice")));
        }
    }
    Ok(fiber.iter().chain(base).cloned().collect::<Vec<_>>().into())
}

impl<F: PrimeField> Tower<F> {
    /// Validate and build. Variables are ordered `fiber ++ base`.
    pub fn new(
        fiber_vars: Vec<String>,
        base_vars: Vec<String>,
        mode: Mode,
        rank: usize,
        sigmas: Vec<PolyMatrix<F>>,
    ) -> Result<Self> {
        let vars = join_vars(&fiber_vars, &base_vars)?;
        if sigmas.is_empty() {
            return Err(Error::Validation("a tower needs at least one sigma".into()));
        }
        let mut embedded = Vec::with_capacity(sigmas.len());
        for (index, s) in sigmas.into_iter().enumerate() {
            if s.nrows() != rank || !s.is_square() {
                return Err(Error::Sigma {
                    index,
                    reason: format!("expected {rank}x{rank}, found {}x{}", s.nrows(), s.ncols()),
                });
            }
            let s = s.embed(&vars)?;
            if let Err(Error::Invertibility { determinant }) = s.unit_determinant() {
                return Err(Error::Sigma {
                    index,
                    reason: format!("determinant {determinant} is not a nonzero constant"),
                });
            }
            embedded.push(s);
        }
        Ok(Tower { fiber_vars, base_vars, vars, mode, rank, sigmas: embedded })
    }

    /// Parse sigma matrices given as row-major polynomial strings.
    pub fn from_strings(
        fiber_vars: Vec<String>,
        base_vars: Vec<String>,
        mode: Mode,
        rank: usize,
        sigmas: &[Vec<Vec<String>>],
    ) -> Result<Self> {
        let vars = join_vars(&fiber_vars, &base_vars)?;
        let parsed = sigmas.iter().map(|m| PolyMatrix::parse(&vars, m)).collect::<Result<Vec<_>>>()?;
        Self::new(fiber_vars, base_vars, mode, rank, parsed)
    }

    pub fn identity(
        fiber_vars: Vec<String>,
        base_vars: Vec<String>,
        mode: Mode,
        rank: usize,
        length: usize,
    ) -> Result<Self> {
        let vars = join_vars(&fiber_vars, &base_vars)?;
        let sigmas = vec![PolyMatrix::identity(&vars, rank); length];
        Self::new(fiber_vars, base_vars, mode, rank, sigmas)
    }

    pub fn p(&self) -> u32 {
        F::CHARACTERISTIC
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn fiber_vars(&self) -> &[String] {
        &self.fiber_vars
    }

    pub fn base_vars(&self) -> &[String] {
        &self.base_vars
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn len(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn sigmas(&self) -> &[PolyMatrix<F>] {
        &self.sigmas
    }

    /// Positions of the variables twisted by Frobenius; these are also the
    /// variables the stratification differentiates.
    pub fn twisted(&self) -> Vec<usize> {
        match self.mode {
            Mode::Absolute => (0..self.vars.len()).collect(),
            Mode::Relative => (0..self.fiber_vars.len()).collect(),
        }
    }

    pub fn twisted_names(&self) -> Vec<String> {
        self.twisted().into_iter().map(|i| self.vars[i].clone()).collect()
    }

    /// The same matrices with a different fiber/base split of the same
    /// ordered variable list.
    pub fn with_split(&self, fiber_vars: Vec<String>, base_vars: Vec<String>, mode: Mode) -> Result<Self> {
        let vars = join_vars(&fiber_vars, &base_vars)?;
        if vars[..] != self.vars[..] {
            return Err(Error::Precondition("a split must keep the variable order".into()));
        }
        Ok(Tower { fiber_vars, base_vars, vars, mode, rank: self.rank, sigmas: self.sigmas.clone() })
    }

    fn phi(&self, m: &PolyMatrix<F>, times: usize) -> PolyMatrix<F> {
        m.frobenius_at(&self.twisted(), times as u32)
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.len() {
            return Err(Error::LevelExceeded {
                order: p_power::<F>(level as u32 - 1),
                limit: p_power::<F>(self.len() as u32),
            });
        }
        Ok(())
    }

    /// `G_level = S_0 φ(S_1) ⋯ φ^{level-1}(S_{level-1})`.
    pub fn composite_frame(&self, level: usize) -> Result<PolyMatrix<F>> {
        self.check_level(level)?;
        let mut g = PolyMatrix::identity(&self.vars, self.rank);
        for (i, s) in self.sigmas.iter().take(level).enumerate() {
            g = g.checked_mul(&self.phi(s, i))?;
        }
        Ok(g)
    }

    pub fn composite_frame_inverse(&self, level: usize) -> Result<PolyMatrix<F>> {
        self.check_level(level)?;
        let mut g = PolyMatrix::identity(&self.vars, self.rank);
        for (i, s) in self.sigmas.iter().take(level).enumerate() {
            g = self.phi(&s.inverse_unit()?, i).checked_mul(&g)?;
        }
        Ok(g)
    }

    pub fn validate(&self) -> Result<ValidationReport<F>> {
        let mut checks = Vec::new();
        for (i, s) in self.sigmas.iter().enumerate() {
            let det = s.unit_determinant()?;
            checks.push(ValidationCheck {
                name: format!("sigmas[{i}]"),
                passed: true,
                detail: format!("{}x{}, determinant {det}", s.nrows(), s.ncols()),
            });
        }
        let g = self.composite_frame(self.len())?;
        let det = g.unit_determinant()?;
        checks.push(ValidationCheck {
            name: "composite_frame".into(),
            passed: true,
            detail: format!("determinant {det}"),
        });
        Ok(ValidationReport { checks, composite_frame: g })
    }

    /// `∇(D_n) v = G_ℓ D_n(G_ℓ^{-1} v)` for `|n| < p^ℓ`.
    pub fn stratified_action(&self, n: &MultiIndex, v: &[Poly<F>]) -> Result<PolyVector<F>> {
        let twisted = self.twisted();
        if n.len() != twisted.len() {
            return Err(Error::Dimension(format!(
                "operator index has {} entries, expected {}",
                n.len(),
                twisted.len()
            )));
        }
        if v.len() != self.rank {
            return Err(Error::Dimension("vector length does not match rank".into()));
        }
        let limit = p_power::<F>(self.len() as u32);
        if n.degree() as usize >= limit {
            return Err(Error::LevelExceeded { order: n.degree() as usize, limit });
        }
        let v = v.iter().map(|x| x.embed(&self.vars)).collect::<Result<Vec<_>>>()?;
        let g = self.composite_frame(self.len())?;
        let w = self.composite_frame_inverse(self.len())?.mul_vec(&v)?;
        let dw: Vec<Poly<F>> = w.iter().map(|x| x.divided_derivative(&twisted, n)).collect();
        g.mul_vec(&dw)
    }

    /// The stratification of the given level carried by `G_level`.
    pub fn stratification(&self, level: usize) -> Result<Stratification<F>> {
        let g = self.composite_frame(level)?;
        Stratification::from_frame(&g, &self.twisted(), level as u32)
    }

    /// The connection whose horizontal frame is `S_i`.
    pub fn level_connection(&self, i: usize) -> Result<Connection<F>> {
        let s = self.sigmas.get(i).ok_or_else(|| Error::Precondition(format!("tower has no level {i}")))?;
        let frame = crate::connection::Frame::new(s.clone())?;
        Connection::frobenius_pullback(&frame, &self.twisted())
    }

    /// `A_a = -∂_a(S_0) S_0^{-1}`.
    pub fn level1_connection(&self) -> Result<Connection<F>> {
        self.level_connection(0)
    }

    /// Pad with identity matrices up to `length`.
    pub fn extend(&self, length: usize) -> Self {
        let mut t = self.clone();
        while t.sigmas.len() < length {
            t.sigmas.push(PolyMatrix::identity(&self.vars, self.rank));
        }
        t
    }

    /// Basis of the truncated horizontal sections, in reduced echelon form
    /// with respect to (degree, graded-lex monomial, component).
    pub fn truncated_h0(&self, level: usize, degree_cap: u32) -> Result<TruncatedH0<F>> {
        self.check_level(level)?;
        let r = self.rank;
        let monos = MultiIndex::up_to_degree(self.vars.len(), degree_cap);
        let n = monos.len() * r;
        let basis = if level == 0 {
            (0..n).map(|u| (0..n).map(|c| if c == u { F::one() } else { F::zero() }).collect()).collect::<Vec<Vec<F>>>()
        } else {
            let strat = self.stratification(level)?;
            let ops: Vec<(usize, usize)> =
                (0..self.twisted().len()).flat_map(|a| (0..level).map(move |j| (a, j))).collect();
            let p = F::CHARACTERISTIC as usize;
            let images = (0..n)
                .into_par_iter()
                .map(|u| {
                    let (m, k) = (&monos[u / r], u % r);
                    ops.iter()
                        .map(|&(a, j)| strat.axis_action_on_basis(a, p.pow(j as u32), m, k))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let mut rows: HashMap<(usize, usize, MultiIndex), usize> = HashMap::new();
            let mut columns = Vec::with_capacity(n);
            for per_op in images {
                let mut col = Vec::new();
                for (o, img) in per_op.into_iter().enumerate() {
                    for (row, entry) in img.iter().enumerate() {
                        for (e, &c) in entry.terms() {
                            let next = rows.len();
                            let idx = *rows.entry((o, row, e.clone())).or_insert(next);
                            col.push((idx, c));
                        }
                    }
                }
                columns.push(col);
            }
            kernel_of_columns(&columns, rows.len())
        };
        let echelon = echelon_by_leading(&basis, n);
        let basis = echelon
            .iter()
            .map(|v| {
                (0..r)
                    .map(|k| {
                        Poly::from_terms(&self.vars, monos.iter().enumerate().map(|(mi, m)| (m.clone(), v[mi * r + k])))
                    })
                    .collect()
            })
            .collect();
        Ok(TruncatedH0 { level: level as u32, degree_cap, basis })
    }

    /// The truncated `H^0` at the first level `L` with `p^L > degree_cap`,
    /// where the dimension no longer depends on `L`.
    pub fn h0_str(&self, degree_cap: u32) -> Result<H0Str<F>> {
        let mut level = 0u32;
        while p_power::<F>(level) <= degree_cap as usize {
            level += 1;
        }
        let h = self.truncated_h0(level as usize, degree_cap)?;
        Ok(H0Str { dimension: h.dimension(), level, degree_cap, basis: h.basis })
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.vars[..] != other.vars[..] {
            return Err(Error::Precondition("towers over different variables".into()));
        }
        if self.twisted() != other.twisted() {
            return Err(Error::Mode(format!("{} tower against {} tower", self.mode, other.mode)));
        }
        Ok(())
    }

    /// Level-wise Kronecker product.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.len() != other.len() {
            return Err(Error::Precondition(format!("tower lengths {} and {} differ", self.len(), other.len())));
        }
        let sigmas = self.sigmas.iter().zip(&other.sigmas).map(|(a, b)| a.kronecker(b)).collect::<Result<Vec<_>>>()?;
        Tower::new(self.fiber_vars.clone(), self.base_vars.clone(), self.mode, self.rank * other.rank, sigmas)
    }

    /// `S_i^∨ = (S_i^T)^{-1}`.
    pub fn dual(&self) -> Result<Self> {
        let sigmas = self.sigmas.iter().map(|s| s.transpose().inverse_unit()).collect::<Result<Vec<_>>>()?;
        Tower::new(self.fiber_vars.clone(), self.base_vars.clone(), self.mode, self.rank, sigmas)
    }

    /// The rank-one identity tower on the same variables.
    pub fn unit(&self) -> Self {
        let sigmas = vec![PolyMatrix::identity(&self.vars, 1); self.len()];
        Tower { rank: 1, sigmas, ..self.clone() }
    }
}

/// Search for an isomorphism `b -> a` given by a chain of unit-determinant
/// matrices with `H_i S_i^b = S_i^a φ(H_{i+1})`, trying `deg H_0 = 0, 1, …`.
///
/// `H_0` ranges over the `F_p`-space of matrices with
/// `(G^a)^{-1} H_0 G^b` in the image of `φ^ℓ`; the rest of the chain is
/// determined by it. `Ok(None)` means no witness was found within the bound.
pub fn gauge_equivalent<F: PrimeField>(
    a: &Tower<F>,
    b: &Tower<F>,
    max_degree: usize,
) -> Result<Option<GaugeWitness<F>>> {
    if a.rank != b.rank {
        return Err(Error::Precondition(format!("ranks {} and {} differ", a.rank, b.rank)));
    }
    a.check_compatible(b)?;
    if a.len() != b.len() {
        return Err(Error::Precondition(format!("lengths {} and {} differ", a.len(), b.len())));
    }
    let (r, l) = (a.rank, a.len());
    let twisted = a.twisted();
    let ga_inv = a.composite_frame_inverse(l)?;
    let gb = b.composite_frame(l)?;

    let identity = PolyMatrix::identity(&a.vars, r);
    if let Some(w) = chain_from(a, b, &identity)? {
        return Ok(Some(GaugeWitness { chain: w, degree: 0 }));
    }

    let q = p_power::<F>(l as u32) as u32;
    let bad = |e: &MultiIndex| twisted.iter().any(|&i| !e[i].is_multiple_of(q));
    let products: Vec<Poly<F>> = (0..r * r * r * r)
        .map(|idx| {
            let (u, i, j, v) = (idx / (r * r * r), idx / (r * r) % r, idx / r % r, idx % r);
            ga_inv.get(u, i) * gb.get(j, v)
        })
        .collect();

    for d in 0..=max_degree {
        let monos = MultiIndex::up_to_degree(a.vars.len(), d as u32);
        let n = monos.len() * r * r;
        let mut rows: HashMap<(usize, usize, MultiIndex), usize> = HashMap::new();
        let mut columns = Vec::with_capacity(n);
        for m in &monos {
            for i in 0..r {
                for j in 0..r {
                    let mut col = Vec::new();
                    for u in 0..r {
                        for v in 0..r {
                            let prod = &products[((u * r + i) * r + j) * r + v];
                            for (e, &c) in prod.terms() {
                                let e = e + m;
                                if bad(&e) {
                                    let next = rows.len();
                                    let idx = *rows.entry((u, v, e)).or_insert(next);
                                    col.push((idx, c));
                                }
                            }
                        }
                    }
                    columns.push(col);
                }
            }
        }
        let space = kernel_of_columns(&columns, rows.len());
        let to_matrix = |coeffs: &[F]| -> PolyMatrix<F> {
            let mut h = PolyMatrix::zero(&a.vars, r, r);
            for i in 0..r {
                for j in 0..r {
                    let terms = monos.iter().enumerate().map(|(mi, m)| (m.clone(), coeffs[(mi * r + i) * r + j]));
                    h.set(i, j, Poly::from_terms(&a.vars, terms));
                }
            }
            h
        };
        for h in candidates(&space) {
            let h = to_matrix(&h);
            if h.unit_determinant().is_err() {
                continue;
            }
            if let Some(chain) = chain_from(a, b, &h)? {
                return Ok(Some(GaugeWitness { chain, degree: d }));
            }
        }
    }
    Ok(None)
}

/// Basis vectors, then every combination if the space is small, then a
/// fixed-seed sample of random combinations.
fn candidates<F: PrimeField>(space: &[Vec<F>]) -> Box<dyn Iterator<Item = Vec<F>> + '_> {
    const EXHAUSTIVE_LIMIT: f64 = 4096.0;
    const SAMPLES: usize = 4096;
    let k = space.len();
    let Some(n) = space.first().map(|v| v.len()) else {
        return Box::new(std::iter::empty());
    };
    let p = F::CHARACTERISTIC as u64;
    let combine = move |coeffs: &[F]| -> Vec<F> {
        let mut out = vec![F::zero(); n];
        for (c, v) in coeffs.iter().zip(space) {
            if c.is_zero() {
                continue;
            }
            for (o, &x) in out.iter_mut().zip(v) {
                *o += *c * x;
            }
        }
        out
    };
    let basis = space.iter().cloned();
    if (p as f64).powi(k as i32) <= EXHAUSTIVE_LIMIT {
        let total = p.pow(k as u32);
        let all = (1..total).map(move |mut idx| {
            let coeffs: Vec<F> = (0..k)
                .map(|_| {
                    let c = F::from_u64(idx % p);
                    idx /= p;
                    c
                })
                .collect();
            combine(&coeffs)
        });
        Box::new(basis.chain(all))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let sampled = (0..SAMPLES).map(move |_| {
            let coeffs: Vec<F> = (0..k).map(|_| F::from_u64(rng.gen_range(0..p))).collect();
            combine(&coeffs)
        });
        Box::new(basis.chain(sampled))
    }
}

/// The chain generated by `H_0 = h`, if every step has polynomial entries.
fn chain_from<F: PrimeField>(a: &Tower<F>, b: &Tower<F>, h: &PolyMatrix<F>) -> Result<Option<Vec<PolyMatrix<F>>>> {
    if h.unit_determinant().is_err() {
        return Ok(None);
    }
    let twisted = a.twisted();
    let mut chain = vec![h.clone()];
    for (sa, sb) in a.sigmas.iter().zip(&b.sigmas) {
        let next = sa.inverse_unit()?.checked_mul(chain.last().unwrap())?.checked_mul(sb)?;
        match next.frobenius_root(&twisted, 1) {
            Some(m) => chain.push(m),
            None => return Ok(None),
        }
    }
    Ok(Some(chain))
}

/// Build a tower of length `levels` from a stratification by iterated
/// Cartier descent.
///
/// At level `i` the sections of `E^(i)` are `G_i φ^i(w)`; the derivation
/// `∂_a` acts on `w` through `∇(D_{p^i e_a})`, giving
/// `A^(i)_a = φ^{-i}(G_i^{-1} ∇(D_{p^i e_a})(G_i))`. Descending that
/// connection yields `S_i` and `G_{i+1} = G_i φ^i(S_i)`. Levels at or beyond
/// the level of the stratification carry no data and get `S_i = I`.
///
/// The result is absolute when every variable is active, relative otherwise.
pub fn descend_tower<F: PrimeField>(
    strat: &Stratification<F>,
    levels: usize,
    max_degree: Option<usize>,
) -> Result<Tower<F>> {
    let vars = strat.vars().clone();
    let active = strat.active().to_vec();
    let r = strat.rank();
    let mut g = PolyMatrix::identity(&vars, r);
    let mut g_inv = g.clone();
    let mut sigmas = Vec::with_capacity(levels);
    for i in 0..levels {
        let s = if (i as u32) < strat.level() {
            let c = p_power::<F>(i as u32);
            let mut mats = Vec::with_capacity(active.len());
            for a in 0..active.len() {
                let img = strat.axis_action_matrix(a, c, &g)?;
                let m = g_inv.checked_mul(&img)?;
                let root = m.frobenius_root(&active, i as u32).ok_or_else(|| Error::StratificationObstruction {
                    level: i,
                    reason: format!("D_{c} along {} does not preserve the level-{i} sections", vars[active[a]]),
                })?;
                mats.push(root);
            }
            let conn = Connection::new(&vars, &active, mats)?;
            conn.check_p_flat().map_err(|e| Error::StratificationObstruction { level: i, reason: e.to_string() })?;
            conn.cartier_descent(max_degree)?.into_matrix()
        } else {
            PolyMatrix::identity(&vars, r)
        };
        let twisted_s = s.frobenius_at(&active, i as u32);
        g = g.checked_mul(&twisted_s)?;
        g_inv = twisted_s.inverse_unit()?.checked_mul(&g_inv)?;
        sigmas.push(s);
    }
    let fiber: Vec<String> = active.iter().map(|&i| vars[i].clone()).collect();
    let base: Vec<String> = (0..vars.len()).filter(|i| !active.contains(i)).map(|i| vars[i].clone()).collect();
    let mode = if base.is_empty() { Mode::Absolute } else { Mode::Relative };
    if fiber.iter().chain(&base).cloned().collect::<Vec<_>>()[..] != vars[..] {
        return Err(Error::Precondition("active variables must precede the others".into()));
    }
    Tower::new(fiber, base, mode, r, sigmas)
}
