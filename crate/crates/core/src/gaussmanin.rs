//! Relative horizontal sections and the Gauss-Manin tower over a line.
//!
//! A tower on `A^k × A^1` with fiber variables `x` and base variable `s` is
//! pushed forward along the projection. Fiber operators `D_n` are linear over
//! `R = F_p[s]`, so the relatively horizontal sections of fiber degree at most
//! `D` form a free `R`-module; base operators act on it through the lift
//! `∂_s ↦ ∂_s`, and the resulting stratification over `R` is descended to a
//! tower on the base.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::arith::field::PrimeField;
use crate::arith::multi_index::MultiIndex;
use crate::arith::poly::{var_index, Poly, Vars};
use crate::arith::unipoly::UniPoly;
use crate::diffop::DiffOperator;
use crate::error::{Error, Result};
use crate::linalg::fp::SpanBuilder;
use crate::linalg::matrix::{PolyMatrix, PolyVector};
use crate::linalg::pid::{self, RVector};
use crate::stratification::{p_power, Stratification};
use crate::tower::{descend_tower, Mode, Tower};

/// Which variables of a tower are fiber coordinates and which are base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeSplit {
    fiber_vars: Vec<String>,
    base_vars: Vec<String>,
    fiber_pos: Vec<usize>,
    base_pos: Vec<usize>,
}

impl RelativeSplit {
    pub fn new<F: PrimeField>(t: &Tower<F>, fiber_vars: &[&str], base_vars: &[&str]) -> Result<Self> {
        let fiber_pos = fiber_vars.iter().map(|n| var_index(t.vars(), n)).collect::<Result<Vec<_>>>()?;
        let base_pos = base_vars.iter().map(|n| var_index(t.vars(), n)).collect::<Result<Vec<_>>>()?;
        let mut all: Vec<usize> = fiber_pos.iter().chain(&base_pos).copied().collect();
        all.sort_unstable();
        all.dedup();
        if all.len() != fiber_pos.len() + base_pos.len() {
            return Err(Error::Name("fiber and base variables overlap".into()));
        }
        if all.len() != t.vars().len() {
            return Err(Error::Name("the split must cover every variable of the tower".into()));
        }
        Ok(RelativeSplit {
            fiber_vars: fiber_vars.iter().map(|s| s.to_string()).collect(),
            base_vars: base_vars.iter().map(|s| s.to_string()).collect(),
            fiber_pos,
            base_pos,
        })
    }

    /// The split recorded in the tower itself.
    pub fn of<F: PrimeField>(t: &Tower<F>) -> Self {
        let nf = t.fiber_vars().len();
        RelativeSplit {
            fiber_vars: t.fiber_vars().to_vec(),
            base_vars: t.base_vars().to_vec(),
            fiber_pos: (0..nf).collect(),
            base_pos: (nf..nf + t.base_vars().len()).collect(),
        }
    }

    pub fn fiber_vars(&self) -> &[String] {
        &self.fiber_vars
    }

    pub fn base_vars(&self) -> &[String] {
        &self.base_vars
    }

    fn single_base(&self) -> Result<usize> {
        match self.base_pos.as_slice() {
            [s] => Ok(*s),
            _ => Err(Error::Precondition(format!(
                "pushforward needs exactly one base variable, found {}",
                self.base_pos.len()
            ))),
        }
    }

    fn base_ring_vars(&self) -> Vars {
        self.base_vars.clone().into()
    }

    fn fiber_ring_vars(&self) -> Vars {
        self.fiber_vars.clone().into()
    }
}

/// An `R`-basis of the relatively horizontal sections of bounded fiber degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeH0Module<F: PrimeField> {
    pub level: u32,
    pub degree_cap: u32,
    /// Generators as vectors over the tower's variables.
    pub generators: Vec<PolyVector<F>>,
    /// The same generators as `R`-coordinate vectors, in Hermite normal form.
    coords: Vec<RVector<F>>,
    monomials: Vec<MultiIndex>,
}

impl<F: PrimeField> RelativeH0Module<F> {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }
}

/// A tower on the base together with the generators realizing it inside the
/// pushforward.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GMTower<F: PrimeField> {
    pub tower: Tower<F>,
    pub embedding: Vec<PolyVector<F>>,
    /// `R`-rank of the relative sections at levels `1..=L`.
    pub ranks: Vec<usize>,
    pub stabilized: bool,
    pub level: u32,
    pub degree_cap: u32,
}

impl<F: PrimeField> GMTower<F> {
    pub fn rank(&self) -> usize {
        self.tower.rank()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow<F: PrimeField> {
    pub point: Vec<F>,
    pub dimension: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChangePoint<F: PrimeField> {
    pub point: F,
    pub gm_dimension: usize,
    pub fiber_dimension: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseChangeReport<F: PrimeField> {
    pub level: u32,
    pub degree_cap: u32,
    pub ranks: Vec<usize>,
    pub stabilized: bool,
    pub points: Vec<BaseChangePoint<F>>,
}

impl<F: PrimeField> BaseChangeReport<F> {
    pub fn all_equal(&self) -> bool {
        self.points.iter().all(|p| p.equal)
    }

    /// Inequality is only ever reported against truncation caps.
    pub fn inconclusive(&self) -> bool {
        !self.stabilized || !self.all_equal()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubobjectCheck<F: PrimeField> {
    pub point: F,
    pub sub_rank: usize,
    pub trivial_rank: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximalPullbackSub<F: PrimeField> {
    pub gm: GMTower<F>,
    pub embedding: Vec<PolyVector<F>>,
    pub fibers: Vec<SubobjectCheck<F>>,
}

impl<F: PrimeField> MaximalPullbackSub<F> {
    pub fn all_equal(&self) -> bool {
        self.fibers.iter().all(|c| c.equal)
    }
}

/// Split a vector over `(x, s)` into fiber monomial coordinates with
/// coefficients in `F_p[s]`. `None` if some fiber monomial is missing.
fn to_r_coords<F: PrimeField>(
    v: &[Poly<F>],
    split: &RelativeSplit,
    s: usize,
    index: &HashMap<MultiIndex, usize>,
) -> Option<RVector<F>> {
    let r = v.len();
    let mut out: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); index.len() * r];
    for (k, entry) in v.iter().enumerate() {
        for (e, &c) in entry.terms() {
            let m = MultiIndex::new(split.fiber_pos.iter().map(|&i| e[i]).collect());
            let mi = *index.get(&m)?;
            *out[mi * r + k].entry(e[s] as usize).or_insert(F::zero()) += c;
        }
    }
    Some(out.into_iter().map(uni_from_map).collect())
}

fn uni_from_map<F: PrimeField>(m: BTreeMap<usize, F>) -> UniPoly<F> {
    let len = m.keys().next_back().map_or(0, |&k| k + 1);
    let mut c = vec![F::zero(); len];
    for (k, v) in m {
        c[k] = v;
    }
    UniPoly::from_coeffs(c)
}

fn from_r_coords<F: PrimeField>(
    coords: &[UniPoly<F>],
    vars: &Vars,
    split: &RelativeSplit,
    s: usize,
    monomials: &[MultiIndex],
    r: usize,
) -> PolyVector<F> {
    (0..r)
        .map(|k| {
            let mut terms = Vec::new();
            for (mi, m) in monomials.iter().enumerate() {
                for (d, &c) in coords[mi * r + k].coeffs().iter().enumerate() {
                    let mut e = vec![0; vars.len()];
                    for (j, &pos) in split.fiber_pos.iter().enumerate() {
                        e[pos] = m[j];
                    }
                    e[s] = d as u32;
                    terms.push((MultiIndex::new(e), c));
                }
            }
            Poly::from_terms(vars, terms)
        })
        .collect()
}

fn uni_to_poly<F: PrimeField>(u: &UniPoly<F>, vars: &Vars) -> Poly<F> {
    Poly::from_terms(vars, u.coeffs().iter().enumerate().map(|(d, &c)| (MultiIndex::new(vec![d as u32]), c)))
}

fn axis_index<F: PrimeField>(strat: &Stratification<F>, pos: usize) -> Result<usize> {
    strat
        .active()
        .iter()
        .position(|&a| a == pos)
        .ok_or_else(|| Error::Mode(format!("variable {} is not differentiated by this tower", strat.vars()[pos])))
}

/// The `R`-module of sections of fiber degree at most `degree_cap` killed by
/// every fiber operator `D_n` with `0 < |n| < p^level`.
pub fn relative_h0<F: PrimeField>(
    t: &Tower<F>,
    split: &RelativeSplit,
    level: usize,
    degree_cap: u32,
) -> Result<RelativeH0Module<F>> {
    let s = split.single_base()?;
    let r = t.rank();
    let strat = if level == 0 { None } else { Some(t.stratification(level)?) };
    let monomials = MultiIndex::up_to_degree(split.fiber_pos.len(), degree_cap);
    let n = monomials.len() * r;

    let coords = match &strat {
        None => {
            (0..n).map(|u| (0..n).map(|c| if c == u { UniPoly::one() } else { UniPoly::zero() }).collect()).collect()
        }
        Some(strat) => {
            let axes = split.fiber_pos.iter().map(|&pos| axis_index(strat, pos)).collect::<Result<Vec<_>>>()?;
            let p = F::CHARACTERISTIC as usize;
            let nvars = t.vars().len();
            // Rows are keyed by (operator, component, full monomial without s).
            let images = (0..n)
                .into_par_iter()
                .map(|u| {
                    let (m, k) = (&monomials[u / r], u % r);
                    let mut e = vec![0; nvars];
                    for (j, &pos) in split.fiber_pos.iter().enumerate() {
                        e[pos] = m[j];
                    }
                    let full = MultiIndex::new(e);
                    let mut out = Vec::new();
                    for &a in &axes {
                        for j in 0..level {
                            out.push(strat.axis_action_on_basis(a, p.pow(j as u32), &full, k)?);
                        }
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut rows: HashMap<(usize, usize, MultiIndex), usize> = HashMap::new();
            let mut sparse: Vec<Vec<(usize, usize, F)>> = Vec::with_capacity(n);
            for per_op in &images {
                let mut col = Vec::new();
                for (o, img) in per_op.iter().enumerate() {
                    for (row, entry) in img.iter().enumerate() {
                        for (e, &c) in entry.terms() {
                            let mut key = e.as_slice().to_vec();
                            let d = std::mem::take(&mut key[s]);
                            let next = rows.len();
                            let idx = *rows.entry((o, row, MultiIndex::new(key))).or_insert(next);
                            col.push((idx, d as usize, c));
                        }
                    }
                }
                sparse.push(col);
            }
            let nrows = rows.len();
            let columns: Vec<RVector<F>> = sparse
                .into_iter()
                .map(|col| {
                    let mut maps: Vec<BTreeMap<usize, F>> = vec![BTreeMap::new(); nrows];
                    for (i, d, c) in col {
                        *maps[i].entry(d).or_insert(F::zero()) += c;
                    }
                    maps.into_iter().map(uni_from_map).collect()
                })
                .collect();
            pid::kernel(&columns, nrows)
        }
    };
    let coords = pid::hermite(&coords);
    let generators = coords.iter().map(|c| from_r_coords(c, t.vars(), split, s, &monomials, r)).collect();
    Ok(RelativeH0Module { level: level as u32, degree_cap, generators, coords, monomials })
}

fn express<F: PrimeField>(
    images: &[PolyVector<F>],
    m: &RelativeH0Module<F>,
    split: &RelativeSplit,
    s: usize,
    base_vars: &Vars,
) -> Result<PolyMatrix<F>> {
    let index: HashMap<MultiIndex, usize> =
        m.monomials.iter().cloned().enumerate().map(|(i, mono)| (mono, i)).collect();
    let closure = || Error::TruncationClosure { level: m.level as usize, degree: m.degree_cap as usize };
    let g = m.rank();
    let mut out = PolyMatrix::zero(base_vars, g, g);
    for (j, img) in images.iter().enumerate() {
        let v = to_r_coords(img, split, s, &index).ok_or_else(closure)?;
        let c = pid::solve(&m.coords, &v).ok_or_else(closure)?;
        for (i, ci) in c.iter().enumerate() {
            out.set(i, j, uni_to_poly(ci, base_vars));
        }
    }
    Ok(out)
}

/// The matrix of `∇(D_{k e_s})` on the generators: column `j` holds the
/// `R`-coordinates of the image of generator `j`.
pub fn tau_action<F: PrimeField>(
    t: &Tower<F>,
    split: &RelativeSplit,
    m: &RelativeH0Module<F>,
    k: u32,
) -> Result<PolyMatrix<F>> {
    let s = split.single_base()?;
    if t.mode() != Mode::Absolute {
        return Err(Error::Mode("base operators need an absolute tower".into()));
    }
    let twisted = t.twisted();
    let n = MultiIndex::axis(twisted.len(), s, k);
    let images = m.generators.iter().map(|g| t.stratified_action(&n, g)).collect::<Result<Vec<_>>>()?;
    express(&images, m, split, s, &split.base_ring_vars())
}

/// The same matrix computed through the lift `∂_s + Σ h_a ∂_{x_a}`, as
/// `(∂_s + Σ h_a ∂_{x_a})^k / k!` for `k < p`.
pub fn tau_action_lifted<F: PrimeField>(
    t: &Tower<F>,
    split: &RelativeSplit,
    m: &RelativeH0Module<F>,
    k: u32,
    lift: &[Poly<F>],
) -> Result<PolyMatrix<F>> {
    let s = split.single_base()?;
    if t.mode() != Mode::Absolute {
        return Err(Error::Mode("base operators need an absolute tower".into()));
    }
    if k >= F::CHARACTERISTIC {
        return Err(Error::Precondition(format!("lifted powers need k < p, got {k}")));
    }
    if lift.len() != split.fiber_pos.len() {
        return Err(Error::Dimension("one lift coefficient per fiber variable".into()));
    }
    let vars = t.vars();
    let active = t.twisted();
    let len = active.len();
    let mut tau = DiffOperator::basis(vars, &active, MultiIndex::axis(len, s, 1));
    for (h, &pos) in lift.iter().zip(&split.fiber_pos) {
        let h = h.embed(vars)?;
        tau = tau.checked_add(&DiffOperator::term(h, &active, MultiIndex::axis(len, pos, 1)))?;
    }
    let mut fact = F::one();
    for i in 1..=k {
        fact *= F::from_u64(i as u64);
    }
    let op = tau.power(k)?.scale(fact.inverse().unwrap());
    let strat = t.stratification(t.len())?;
    let images = m.generators.iter().map(|g| strat.apply_operator(&op, g)).collect::<Result<Vec<_>>>()?;
    express(&images, m, split, s, &split.base_ring_vars())
}

/// Push the tower forward to the base.
///
/// Ranks are computed at levels `1..=L`; the result is stabilized when
/// `L ≥ 2`, the last two ranks agree and every base operator of order below
/// `p^L` maps the generators into their span.
pub fn gm_pushforward<F: PrimeField>(
    t: &Tower<F>,
    split: &RelativeSplit,
    level: usize,
    degree_cap: u32,
    max_degree: Option<usize>,
) -> Result<GMTower<F>> {
    split.single_base()?;
    if level == 0 {
        return Err(Error::Precondition("pushforward needs level at least 1".into()));
    }
    let mut ranks = Vec::with_capacity(level);
    let mut module = None;
    for l in 1..=level {
        let m = relative_h0(t, split, l, degree_cap)?;
        ranks.push(m.rank());
        module = Some(m);
    }
    let m = module.unwrap();
    let base_vars = split.base_ring_vars();
    let q = p_power::<F>(level as u32);
    let mut theta = Vec::with_capacity(q);
    for k in 0..q {
        theta.push(tau_action(t, split, &m, k as u32)?);
    }
    let strat = Stratification::from_axis_matrices(&base_vars, &[0], m.rank(), level as u32, vec![theta])?;
    let stabilized = level >= 2 && ranks[level - 2] == ranks[level - 1];
    let tower = if m.rank() == 0 {
        Tower::new(
            vec![split.base_vars[0].clone()],
            vec![],
            Mode::Absolute,
            0,
            vec![PolyMatrix::identity(&base_vars, 0); level],
        )?
    } else {
        descend_tower(&strat, level, max_degree)?
    };
    Ok(GMTower { tower, embedding: m.generators, ranks, stabilized, level: level as u32, degree_cap })
}

fn check_point<F: PrimeField>(c: F) -> Result<()> {
    if c.pow_u64(F::CHARACTERISTIC as u64) != c {
        return Err(Error::Precondition(format!("{c} is not fixed by Frobenius")));
    }
    Ok(())
}

/// The tower on the fiber over `s = c`. Substitution is uniform across
/// levels because `c^p = c` for `c ∈ F_p`.
pub fn fiber_restrict<F: PrimeField>(t: &Tower<F>, split: &RelativeSplit, point: &[F]) -> Result<Tower<F>> {
    if point.len() != split.base_pos.len() {
        return Err(Error::Dimension("one coordinate per base variable".into()));
    }
    for &c in point {
        check_point(c)?;
    }
    let assignments: Vec<(&str, F)> = split.base_vars.iter().map(|s| s.as_str()).zip(point.iter().copied()).collect();
    let fiber_vars = split.fiber_ring_vars();
    let sigmas =
        t.sigmas().iter().map(|m| m.eval_partial(&assignments)?.embed(&fiber_vars)).collect::<Result<Vec<_>>>()?;
    Tower::new(split.fiber_vars.clone(), vec![], Mode::Absolute, t.rank(), sigmas)
}

/// Every `F_p`-point of a base with `b` coordinates, in lexicographic order.
fn base_points<F: PrimeField>(b: usize) -> Vec<Vec<F>> {
    let els: Vec<F> = F::elements();
    let mut points = vec![Vec::new()];
    for _ in 0..b {
        points = points
            .into_iter()
            .flat_map(|pt| {
                els.iter().map(move |&c| {
                    let mut q = pt.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    points
}

/// Fiberwise truncated `H^0` dimensions at every `F_p`-point of the base.
pub fn h0_fiber_scan<F: PrimeField>(
    t: &Tower<F>,
    split: &RelativeSplit,
    level: usize,
    degree_cap: u32,
) -> Result<Vec<ScanRow<F>>> {
    base_points::<F>(split.base_pos.len())
        .into_par_iter()
        .map(|point| {
            let fiber = fiber_restrict(t, split, &point)?;
            let dimension = fiber.truncated_h0(level, degree_cap)?.dimension();
            Ok(ScanRow { point, dimension })
        })
        .collect()
}

fn flatten<F: PrimeField>(v: &[Poly<F>], monomials: &HashMap<MultiIndex, usize>) -> Option<Vec<F>> {
    let r = v.len();
    let mut out = vec![F::zero(); monomials.len() * r];
    for (k, p) in v.iter().enumerate() {
        for (e, &c) in p.terms() {
            out[monomials.get(e)? * r + k] = c;
        }
    }
    Some(out)
}

fn evaluate_generators<F: PrimeField>(
    gens: &[PolyVector<F>],
    split: &RelativeSplit,
    c: F,
) -> Result<Vec<PolyVector<F>>> {
    let fiber_vars = split.fiber_ring_vars();
    let assign = [(split.base_vars[0].as_str(), c)];
    gens.iter().map(|g| g.iter().map(|p| p.eval_partial(&assign)?.embed(&fiber_vars)).collect()).collect()
}

/// Compare, at every point `c`, the span of the Gauss-Manin generators at
/// `s = c` with the truncated `H^0` of the fiber.
pub fn base_change_check<F: PrimeField>(
    t: &Tower<F>,
    split: &RelativeSplit,
    level: usize,
    degree_cap: u32,
    max_degree: Option<usize>,
) -> Result<BaseChangeReport<F>> {
    let gm = gm_pushforward(t, split, level, degree_cap, max_degree)?;
    let monomials: HashMap<MultiIndex, usize> = MultiIndex::up_to_degree(split.fiber_pos.len(), degree_cap)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect();
    let n = monomials.len() * t.rank();
    let points = F::elements()
        .into_par_iter()
        .map(|c| {
            let evaluated = evaluate_generators(&gm.embedding, split, c)?;
            let mut gm_span = SpanBuilder::new(n);
            for v in &evaluated {
                let flat = flatten(v, &monomials).expect("generators respect the degree cap");
                gm_span.insert(&flat);
            }
            let fiber = fiber_restrict(t, split, &[c])?.truncated_h0(level, degree_cap)?;
            let mut fiber_span = SpanBuilder::new(n);
            for v in &fiber.basis {
                fiber_span.insert(&flatten(v, &monomials).expect("basis respects the degree cap"));
            }
            let equal = gm_span.dim() == fiber_span.dim()
                && evaluated.iter().all(|v| fiber_span.contains(&flatten(v, &monomials).unwrap()));
            Ok(BaseChangePoint { point: c, gm_dimension: gm_span.dim(), fiber_dimension: fiber_span.dim(), equal })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BaseChangeReport { level: level as u32, degree_cap, ranks: gm.ranks, stabilized: gm.stabilized, points })
}

/// Rank of the `F_p[x]`-module spanned by vectors in one fiber variable, and
/// its Hermite form for comparison.
fn module_hnf<F: PrimeField>(vs: &[PolyVector<F>]) -> Vec<RVector<F>> {
    let rv: Vec<RVector<F>> = vs
        .iter()
        .map(|v| {
            v.iter()
                .map(|p| {
                    let mut m = BTreeMap::new();
                    for (e, &c) in p.terms() {
                        m.insert(e[0] as usize, c);
                    }
                    uni_from_map(m)
                })
                .collect()
        })
        .collect();
    let mut h = pid::hermite(&rv);
    h.retain(|v| v.iter().any(|e| !e.is_zero()));
    h
}

/// Span comparison of the sub-bundle generated by `a` and by `b`: over
/// `F_p[x]` when the fiber is a line, over `F_p` otherwise.
fn same_subobject<F: PrimeField>(a: &[PolyVector<F>], b: &[PolyVector<F>], nfiber: usize) -> (usize, usize, bool) {
    if nfiber == 1 {
        let (ha, hb) = (module_hnf(a), module_hnf(b));
        return (ha.len(), hb.len(), ha == hb);
    }
    let mut monos: HashMap<MultiIndex, usize> = HashMap::new();
    for v in a.iter().chain(b) {
        for p in v {
            for (e, _) in p.terms() {
                let next = monos.len();
                monos.entry(e.clone()).or_insert(next);
            }
        }
    }
    let r = a.first().or(b.first()).map_or(0, |v| v.len());
    let n = monos.len() * r;
    let mut sa = SpanBuilder::new(n);
    let mut sb = SpanBuilder::new(n);
    let fa: Vec<Vec<F>> = a.iter().map(|v| flatten(v, &monos).unwrap()).collect();
    for v in &fa {
        sa.insert(v);
    }
    for v in b {
        sb.insert(&flatten(v, &monos).unwrap());
    }
    let equal = sa.dim() == sb.dim() && fa.iter().all(|v| sb.contains(v));
    (sa.dim(), sb.dim(), equal)
}

/// The largest sub-bundle pulled back from the base, `f^* f_* E^∇`, with a
/// fiberwise comparison against the maximal trivial subobject of each fiber.
pub fn maximal_pullback_sub<F: PrimeField>(
    t: &Tower<F>,
    split: &RelativeSplit,
    level: usize,
    degree_cap: u32,
    max_degree: Option<usize>,
) -> Result<MaximalPullbackSub<F>> {
    let gm = gm_pushforward(t, split, level, degree_cap, max_degree)?;
    let nfiber = split.fiber_pos.len();
    let fibers = F::elements()
        .into_par_iter()
        .map(|c| {
            let evaluated = evaluate_generators(&gm.embedding, split, c)?;
            let fiber = fiber_restrict(t, split, &[c])?.truncated_h0(level, degree_cap)?;
            let (sub_rank, trivial_rank, equal) = same_subobject(&evaluated, &fiber.basis, nfiber);
            Ok(SubobjectCheck { point: c, sub_rank, trivial_rank, equal })
        })
        .collect::<Result<Vec<_>>>()?;
    let embedding = gm.embedding.clone();
    Ok(MaximalPullbackSub { gm, embedding, fibers })
}

/// `a ⊠ b` on the disjoint union of the variables, level-wise Kronecker.
pub fn external_product<F: PrimeField>(a: &Tower<F>, b: &Tower<F>) -> Result<Tower<F>> {
    if a.mode() != Mode::Absolute || b.mode() != Mode::Absolute {
        return Err(Error::Mode("external products need absolute towers".into()));
    }
    if let Some(v) = a.vars().iter().find(|v| b.vars().contains(v)) {
        return Err(Error::Name(format!("variable {v} occurs in both towers")));
    }
    if a.len() != b.len() {
        return Err(Error::Precondition(format!("tower lengths {} and {} differ", a.len(), b.len())));
    }
    let fiber: Vec<String> = a.fiber_vars().iter().chain(b.fiber_vars()).cloned().collect();
    let base: Vec<String> = a.base_vars().iter().chain(b.base_vars()).cloned().collect();
    let vars: Vars = fiber.iter().chain(&base).cloned().collect::<Vec<_>>().into();
    let sigmas = a
        .sigmas()
        .iter()
        .zip(b.sigmas())
        .map(|(x, y)| x.embed(&vars)?.kronecker(&y.embed(&vars)?))
        .collect::<Result<Vec<_>>>()?;
    Tower::new(fiber, base, Mode::Absolute, a.rank() * b.rank(), sigmas)
}

/// `f^* M` for the projection from `fiber × base` onto the base of `M`.
pub fn pullback<F: PrimeField>(m: &Tower<F>, fiber_vars: &[&str]) -> Result<Tower<F>> {
    if m.mode() != Mode::Absolute {
        return Err(Error::Mode("pullback expects an absolute base tower".into()));
    }
    let fiber: Vec<String> = fiber_vars.iter().map(|s| s.to_string()).collect();
    let base: Vec<String> = m.vars().to_vec();
    let vars: Vars = fiber.iter().chain(&base).cloned().collect::<Vec<_>>().into();
    let sigmas = m.sigmas().iter().map(|s| s.embed(&vars)).collect::<Result<Vec<_>>>()?;
    Tower::new(fiber, base, Mode::Absolute, m.rank(), sigmas)
}
