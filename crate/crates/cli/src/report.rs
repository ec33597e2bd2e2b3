//! Reports: one JSON tree, rendered either as JSON or as sorted
//! `path = value` lines carrying the same content.

use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use strat_core::Error;

/// A failed command: an error kind, a message, and whether it was a cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub kind: String,
    pub message: String,
    pub inconclusive: bool,
}

impl Failure {
    pub fn new(kind: &str, message: String) -> Self {
        Failure { kind: kind.to_string(), message, inconclusive: false }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { kind: e.kind().to_string(), message: e.to_string(), inconclusive: e.is_inconclusive() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Inconclusive,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Error => 1,
            Status::Inconclusive => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub parameters: Map<String, Value>,
    pub findings: Value,
    pub status: Status,
    pub error_kind: Option<String>,
}

pub fn digest(inputs: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update(i);
    }
    format!("sha256:{}", hex::encode(h.finalize()))
}

impl Report {
    pub fn status_string(&self) -> String {
        match (self.status, &self.error_kind) {
            (Status::Ok, _) => "ok".into(),
            (Status::Inconclusive, _) => "inconclusive".into(),
            (Status::Error, Some(k)) => format!("error:{k}"),
            (Status::Error, None) => "error".into(),
        }
    }

    pub fn failed(command: &str, input_digest: String, parameters: Map<String, Value>, f: Failure) -> Self {
        let status = if f.inconclusive { Status::Inconclusive } else { Status::Error };
        Report {
            command: command.into(),
            input_digest,
            parameters,
            findings: json!({ "error": f.message, "error_kind": f.kind }),
            status,
            error_kind: Some(f.kind),
        }
    }

    pub fn to_value(&self) -> Value {
        json!({
            "command": self.command,
            "input_digest": self.input_digest,
            "parameters": Value::Object(self.parameters.clone()),
            "findings": self.findings,
            "status": self.status_string(),
        })
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_value()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        flatten("", &self.to_value(), &mut out);
        out
    }
}

fn flatten(path: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(map) if !map.is_empty() => {
            for (k, x) in map {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                flatten(&p, x, out);
            }
        }
        Value::Array(items) if !items.is_empty() => {
            for (i, x) in items.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), x, out);
            }
        }
        other => {
            let _ = writeln!(out, "{path} = {other}");
        }
    }
}
