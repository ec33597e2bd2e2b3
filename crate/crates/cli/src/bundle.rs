//! Bundle files: a tower, optionally with a split, a connection and an
//! embedding, as JSON with polynomial strings.

use serde::Serialize;
use serde_json::Value;

use strat_core::{Connection, Mode, PolyMatrix, Prime, PrimeField, Tower, Vars};

use crate::report::Failure;

pub type StringMatrix = Vec<Vec<String>>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bundle {
    pub p: u32,
    pub fiber_vars: Vec<String>,
    pub base_vars: Vec<String>,
    pub mode: String,
    pub rank: usize,
    pub sigmas: Vec<StringMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub split: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub embedding: Option<StringMatrix>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub connection: Option<Vec<StringMatrix>>,
}

fn schema(pointer: &str, message: &str) -> Failure {
    Failure::new("parse", format!("at {pointer}: {message}"))
}

fn field<'a>(obj: &'a serde_json::Map<String, Value>, key: &str) -> Result<&'a Value, Failure> {
    obj.get(key).ok_or_else(|| schema(&format!("/{key}"), "missing field"))
}

fn uint(v: &Value, pointer: &str) -> Result<u64, Failure> {
    v.as_u64().ok_or_else(|| schema(pointer, "expected a non-negative integer"))
}

fn strings(v: &Value, pointer: &str) -> Result<Vec<String>, Failure> {
    let arr = v.as_array().ok_or_else(|| schema(pointer, "expected an array of strings"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_str().map(str::to_string).ok_or_else(|| schema(&format!("{pointer}/{i}"), "expected a string"))
        })
        .collect()
}

fn matrix(v: &Value, pointer: &str) -> Result<StringMatrix, Failure> {
    let arr = v.as_array().ok_or_else(|| schema(pointer, "expected an array of rows"))?;
    arr.iter().enumerate().map(|(i, row)| strings(row, &format!("{pointer}/{i}"))).collect()
}

fn matrices(v: &Value, pointer: &str) -> Result<Vec<StringMatrix>, Failure> {
    let arr = v.as_array().ok_or_else(|| schema(pointer, "expected an array of matrices"))?;
    arr.iter().enumerate().map(|(i, m)| matrix(m, &format!("{pointer}/{i}"))).collect()
}

const KNOWN: [&str; 9] = ["p", "fiber_vars", "base_vars", "mode", "rank", "sigmas", "split", "embedding", "connection"];

/// Schema-check and read a bundle. Polynomials are not interpreted here.
pub fn parse_bundle(bytes: &[u8]) -> Result<Bundle, Failure> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| Failure::new("parse", format!("invalid JSON at line {}, column {}: {e}", e.line(), e.column())))?;
    let obj = value.as_object().ok_or_else(|| schema("", "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !KNOWN.contains(&k.as_str())) {
        return Err(schema(&format!("/{k}"), "unknown field"));
    }
    let p = uint(field(obj, "p")?, "/p")?;
    let p = u32::try_from(p).map_err(|_| schema("/p", "too large"))?;
    Prime::new(p).map_err(Failure::from)?;
    let mode = field(obj, "mode")?.as_str().ok_or_else(|| schema("/mode", "expected a string"))?;
    mode.parse::<Mode>().map_err(|_| schema("/mode", "expected \"absolute\" or \"relative\""))?;
    let opt = |key: &str| obj.get(key).filter(|v| !v.is_null());
    let sigmas = match opt("sigmas") {
        Some(v) => matrices(v, "/sigmas")?,
        None => Vec::new(),
    };
    let connection = opt("connection").map(|v| matrices(v, "/connection")).transpose()?;
    if sigmas.is_empty() && connection.is_none() {
        return Err(schema("/sigmas", "a bundle needs sigmas or a connection"));
    }
    Ok(Bundle {
        p,
        fiber_vars: strings(field(obj, "fiber_vars")?, "/fiber_vars")?,
        base_vars: match opt("base_vars") {
            Some(v) => strings(v, "/base_vars")?,
            None => Vec::new(),
        },
        mode: mode.to_string(),
        rank: uint(field(obj, "rank")?, "/rank")? as usize,
        sigmas,
        split: opt("split").map(|v| strings(v, "/split")).transpose()?,
        embedding: opt("embedding").map(|v| matrix(v, "/embedding")).transpose()?,
        connection,
    })
}

/// Pretty JSON with a trailing newline; field order is fixed.
pub fn serialize_bundle(b: &Bundle) -> String {
    let mut s = serde_json::to_string_pretty(b).expect("bundle serializes");
    s.push('\n');
    s
}

impl Bundle {
    pub fn mode(&self) -> Mode {
        self.mode.parse().expect("checked on parse")
    }

    pub fn vars(&self) -> Vars {
        self.fiber_vars.iter().chain(&self.base_vars).cloned().collect::<Vec<_>>().into()
    }

    pub fn tower<F: PrimeField>(&self) -> Result<Tower<F>, Failure> {
        if self.sigmas.is_empty() {
            return Err(Failure::new("validation", "the bundle has no sigmas".into()));
        }
        Ok(Tower::from_strings(self.fiber_vars.clone(), self.base_vars.clone(), self.mode(), self.rank, &self.sigmas)?)
    }

    /// The connection field; one matrix per differentiated variable.
    pub fn connection<F: PrimeField>(&self) -> Result<Option<Connection<F>>, Failure> {
        let Some(mats) = &self.connection else {
            return Ok(None);
        };
        let vars = self.vars();
        let active: Vec<usize> = match self.mode() {
            Mode::Absolute => (0..vars.len()).collect(),
            Mode::Relative => (0..self.fiber_vars.len()).collect(),
        };
        if mats.len() != active.len() {
            return Err(Failure::new(
                "dimension",
                format!("expected {} connection matrices, found {}", active.len(), mats.len()),
            ));
        }
        let parsed = mats
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let pm = PolyMatrix::<F>::parse(&vars, m)?;
                if pm.nrows() != self.rank || !pm.is_square() {
                    return Err(Failure::new("dimension", format!("connection matrix {i} is not {0}x{0}", self.rank)));
                }
                Ok(pm)
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        Ok(Some(Connection::new(&vars, &active, parsed)?))
    }

    /// Base variables for relative computations: `split` when present.
    pub fn base_split(&self) -> (Vec<String>, Vec<String>) {
        match &self.split {
            Some(base) => {
                let fiber = self.vars().iter().filter(|v| !base.contains(v)).cloned().collect();
                (fiber, base.clone())
            }
            None => (self.fiber_vars.clone(), self.base_vars.clone()),
        }
    }

    pub fn from_tower<F: PrimeField>(t: &Tower<F>) -> Self {
        Bundle {
            p: F::CHARACTERISTIC,
            fiber_vars: t.fiber_vars().to_vec(),
            base_vars: t.base_vars().to_vec(),
            mode: t.mode().to_string(),
            rank: t.rank(),
            sigmas: t.sigmas().iter().map(|s| s.to_strings()).collect(),
            split: None,
            embedding: None,
            connection: None,
        }
    }

    /// Re-render every polynomial in canonical form.
    pub fn canonical<F: PrimeField>(&self) -> Result<Self, Failure> {
        let vars = self.vars();
        let canon = |m: &StringMatrix| -> Result<StringMatrix, Failure> {
            m.iter()
                .map(|row| {
                    row.iter()
                        .map(|e| Ok(strat_core::Poly::<F>::parse(e, &vars)?.to_string()))
                        .collect::<Result<Vec<_>, Failure>>()
                })
                .collect::<Result<Vec<_>, Failure>>()
        };
        Ok(Bundle {
            sigmas: self.sigmas.iter().map(canon).collect::<Result<_, _>>()?,
            embedding: self.embedding.as_ref().map(canon).transpose()?,
            connection: self
                .connection
                .as_ref()
                .map(|c| c.iter().map(canon).collect::<Result<Vec<_>, _>>())
                .transpose()?,
            ..self.clone()
        })
    }
}
