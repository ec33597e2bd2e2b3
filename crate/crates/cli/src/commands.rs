//! Library calls behind each subcommand, generic over the field.

use serde_json::{json, Value};

use strat_core::gaussmanin::{
    base_change_check, external_product, fiber_restrict, gm_pushforward, h0_fiber_scan, maximal_pullback_sub,
    RelativeSplit,
};
use strat_core::{descend_tower, MultiIndex, Poly, PolyVector, PrimeField, Stratification, Tower};

use crate::bundle::Bundle;
use crate::report::{Failure, Status};

/// Findings, status, and an optional file to write.
pub struct Done {
    pub findings: Value,
    pub status: Status,
    pub output: Option<String>,
}

impl Done {
    fn ok(findings: Value) -> Self {
        Done { findings, status: Status::Ok, output: None }
    }

    fn with_output(mut self, output: String) -> Self {
        self.output = Some(output);
        self
    }
}

type Outcome = Result<Done, Failure>;

fn columns<F: PrimeField>(vs: &[PolyVector<F>]) -> Vec<Vec<String>> {
    vs.iter().map(|v| v.iter().map(|p| p.to_string()).collect()).collect()
}

pub fn tower_value<F: PrimeField>(t: &Tower<F>) -> Value {
    json!({
        "fiber_vars": t.fiber_vars(),
        "base_vars": t.base_vars(),
        "mode": t.mode().to_string(),
        "rank": t.rank(),
        "sigmas": t.sigmas().iter().map(|s| s.to_strings()).collect::<Vec<_>>(),
    })
}

fn tower_file<F: PrimeField>(t: &Tower<F>) -> String {
    crate::bundle::serialize_bundle(&Bundle::from_tower(t))
}

fn split_of<F: PrimeField>(b: &Bundle, t: &Tower<F>) -> Result<RelativeSplit, Failure> {
    let (fiber, base) = b.base_split();
    let fiber: Vec<&str> = fiber.iter().map(String::as_str).collect();
    let base: Vec<&str> = base.iter().map(String::as_str).collect();
    Ok(RelativeSplit::new(t, &fiber, &base)?)
}

pub fn validate<F: PrimeField>(b: &Bundle) -> Outcome {
    let mut findings = serde_json::Map::new();
    if !b.sigmas.is_empty() {
        let t = b.tower::<F>()?;
        let report = t.validate()?;
        let checks: Vec<Value> =
            report.checks.iter().map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail })).collect();
        findings.insert("checks".into(), Value::Array(checks));
        findings.insert("composite_frame".into(), json!(report.composite_frame.to_strings()));
        findings.insert("length".into(), json!(t.len()));
    }
    if let Some(c) = b.connection::<F>()? {
        let integrable = c.check_integrable().is_ok();
        findings.insert("connection_integrable".into(), json!(integrable));
        findings.insert("connection_p_flat".into(), json!(integrable && c.check_p_flat().is_ok()));
    }
    Ok(Done::ok(Value::Object(findings)))
}

pub fn action<F: PrimeField>(b: &Bundle, index: &[u32], vector: Option<&str>) -> Outcome {
    let t = b.tower::<F>()?;
    let n = MultiIndex::new(index.to_vec());
    let vars = t.vars().clone();
    let inputs: Vec<PolyVector<F>> = match vector {
        Some(v) => vec![v.split(',').map(|e| Poly::parse(e.trim(), &vars)).collect::<Result<_, _>>()?],
        None => (0..t.rank())
            .map(|j| (0..t.rank()).map(|i| if i == j { Poly::one(&vars) } else { Poly::zero(&vars) }).collect())
            .collect(),
    };
    let images = inputs.iter().map(|v| t.stratified_action(&n, v)).collect::<Result<Vec<_>, _>>()?;
    Ok(Done::ok(json!({
        "index": index,
        "operator_variables": t.twisted_names(),
        "images": columns(&images),
    })))
}

pub fn pcurvature<F: PrimeField>(b: &Bundle) -> Outcome {
    let c = match b.connection::<F>()? {
        Some(c) => c,
        None => b.tower::<F>()?.level1_connection()?,
    };
    let psi = c.p_curvature()?;
    let mut per_var = serde_json::Map::new();
    for (name, m) in c.active_names().iter().zip(&psi) {
        per_var.insert(name.clone(), json!(m.to_strings()));
    }
    Ok(Done::ok(json!({
        "connection": c.matrices().iter().map(|m| m.to_strings()).collect::<Vec<_>>(),
        "p_curvature": Value::Object(per_var),
        "vanishes": psi.iter().all(|m| m.is_zero()),
    })))
}

pub fn descend<F: PrimeField>(b: &Bundle, levels: usize, max_degree: Option<usize>) -> Outcome {
    let strat = match b.connection::<F>()? {
        Some(c) => Stratification::from_connection(&c)?,
        None => {
            let t = b.tower::<F>()?;
            t.stratification(levels.min(t.len()))?
        }
    };
    let t = descend_tower(&strat, levels, max_degree)?;
    Ok(Done::ok(json!({ "tower": tower_value(&t) })).with_output(tower_file(&t)))
}

pub fn h0<F: PrimeField>(b: &Bundle, level: usize, degree: u32) -> Outcome {
    let t = b.tower::<F>()?;
    let h = t.truncated_h0(level, degree)?;
    let stable = (F::CHARACTERISTIC as u64).pow(level as u32) > degree as u64;
    Ok(Done::ok(json!({
        "dimension": h.dimension(),
        "basis": columns(&h.basis),
        "degree_below_p_power_level": stable,
    })))
}

pub fn gm<F: PrimeField>(b: &Bundle, level: usize, degree: u32, max_degree: Option<usize>) -> Outcome {
    let t = b.tower::<F>()?;
    let split = split_of(b, &t)?;
    let gm = gm_pushforward(&t, &split, level, degree, max_degree)?;
    let mut file = Bundle::from_tower(&gm.tower);
    file.embedding = Some(columns(&gm.embedding));
    let status = if gm.stabilized { Status::Ok } else { Status::Inconclusive };
    Ok(Done {
        findings: json!({
            "ranks": gm.ranks,
            "stabilized": gm.stabilized,
            "rank": gm.rank(),
            "tower": tower_value(&gm.tower),
            "embedding": columns(&gm.embedding),
        }),
        status,
        output: Some(crate::bundle::serialize_bundle(&file)),
    })
}

fn point<F: PrimeField>(at: &[u32]) -> Result<Vec<F>, Failure> {
    at.iter()
        .map(|&c| {
            if c >= F::CHARACTERISTIC {
                return Err(Failure::new("precondition", format!("{c} is not a residue modulo {}", F::CHARACTERISTIC)));
            }
            Ok(F::from_u64(c as u64))
        })
        .collect()
}

pub fn fiber<F: PrimeField>(b: &Bundle, at: &[u32]) -> Outcome {
    let t = b.tower::<F>()?;
    let split = split_of(b, &t)?;
    let f = fiber_restrict(&t, &split, &point::<F>(at)?)?;
    Ok(Done::ok(json!({ "point": at, "tower": tower_value(&f) })).with_output(tower_file(&f)))
}

pub fn scan<F: PrimeField>(b: &Bundle, level: usize, degree: u32) -> Outcome {
    let t = b.tower::<F>()?;
    let split = split_of(b, &t)?;
    // Lower levels give each fiber's stabilization level: the least level
    // from which the dimension no longer changes up to `level`.
    let by_level = (1..=level).map(|l| h0_fiber_scan(&t, &split, l, degree)).collect::<Result<Vec<_>, _>>()?;
    let rows = match by_level.last() {
        Some(rows) => rows.clone(),
        None => h0_fiber_scan(&t, &split, 0, degree)?,
    };
    let mut tsv = String::from("point\tdimension\n");
    let mut table = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let pt: Vec<u32> = r.point.iter().map(|c| c.residue()).collect();
        let label: Vec<String> = pt.iter().map(|c| c.to_string()).collect();
        tsv.push_str(&format!("{}\t{}\n", label.join(","), r.dimension));
        let settled = by_level.iter().rposition(|rows| rows[i].dimension != r.dimension).map_or(1, |j| j + 2);
        table.push(json!({ "point": pt, "dimension": r.dimension, "stabilization_level": settled.min(level) }));
    }
    Ok(Done::ok(json!({ "table": table })).with_output(tsv))
}

pub fn basechange<F: PrimeField>(b: &Bundle, level: usize, degree: u32, max_degree: Option<usize>) -> Outcome {
    let t = b.tower::<F>()?;
    let split = split_of(b, &t)?;
    let r = base_change_check(&t, &split, level, degree, max_degree)?;
    let points: Vec<Value> = r
        .points
        .iter()
        .map(|p| {
            json!({
                "point": p.point.residue(),
                "gm_dimension": p.gm_dimension,
                "fiber_dimension": p.fiber_dimension,
                "result": if p.equal { "equal" } else { "unequal" },
            })
        })
        .collect();
    let status = if r.inconclusive() { Status::Inconclusive } else { Status::Ok };
    Ok(Done {
        findings: json!({
            "points": points,
            "ranks": r.ranks,
            "stabilized": r.stabilized,
            "all_equal": r.all_equal(),
        }),
        status,
        output: None,
    })
}

pub fn maxsub<F: PrimeField>(b: &Bundle, level: usize, degree: u32, max_degree: Option<usize>) -> Outcome {
    let t = b.tower::<F>()?;
    let split = split_of(b, &t)?;
    let m = maximal_pullback_sub(&t, &split, level, degree, max_degree)?;
    let fibers: Vec<Value> = m
        .fibers
        .iter()
        .map(|c| {
            json!({
                "point": c.point.residue(),
                "sub_rank": c.sub_rank,
                "trivial_rank": c.trivial_rank,
                "result": if c.equal { "equal" } else { "unequal" },
            })
        })
        .collect();
    let status = if m.gm.stabilized && m.all_equal() { Status::Ok } else { Status::Inconclusive };
    Ok(Done {
        findings: json!({
            "gm_rank": m.gm.rank(),
            "stabilized": m.gm.stabilized,
            "tower": tower_value(&m.gm.tower),
            "embedding": columns(&m.embedding),
            "fibers": fibers,
        }),
        status,
        output: None,
    })
}

fn same_prime(a: &Bundle, b: &Bundle) -> Result<(), Failure> {
    if a.p != b.p {
        return Err(Failure::new("validation", format!("bundles over p = {} and p = {}", a.p, b.p)));
    }
    Ok(())
}

pub fn tensor<F: PrimeField>(a: &Bundle, b: &Bundle) -> Outcome {
    same_prime(a, b)?;
    let t = a.tower::<F>()?.tensor(&b.tower::<F>()?)?;
    Ok(Done::ok(json!({ "tower": tower_value(&t) })).with_output(tower_file(&t)))
}

pub fn dual<F: PrimeField>(a: &Bundle) -> Outcome {
    let t = a.tower::<F>()?.dual()?;
    Ok(Done::ok(json!({ "tower": tower_value(&t) })).with_output(tower_file(&t)))
}

pub fn external<F: PrimeField>(a: &Bundle, b: &Bundle) -> Outcome {
    same_prime(a, b)?;
    let t = external_product(&a.tower::<F>()?, &b.tower::<F>()?)?;
    Ok(Done::ok(json!({ "tower": tower_value(&t) })).with_output(tower_file(&t)))
}
