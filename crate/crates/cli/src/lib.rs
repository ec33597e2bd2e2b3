//! The `strat` command-line tool.
//!
//! [`run`] takes the arguments after the program name and an [`Io`] for
//! file access, and returns the exit code with both output streams, so the
//! binary, the self-test and the integration tests share one code path.

pub mod bundle;
pub mod commands;
pub mod report;
pub mod selftest;

use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use strat_core::{F2, F3, F5, F7};

use crate::bundle::{parse_bundle, Bundle};
use crate::commands::Done;
use crate::report::{digest, Failure, Report, Status};

/// File access for [`run`].
pub trait Io: Sync {
    fn read(&self, path: &str) -> io::Result<Vec<u8>>;
    fn write(&self, path: &str, data: &[u8]) -> io::Result<()>;
}

pub struct FsIo;

impl Io for FsIo {
    fn read(&self, path: &str) -> io::Result<Vec<u8>> {
        std::fs::read(path)
    }

    fn write(&self, path: &str, data: &[u8]) -> io::Result<()> {
        std::fs::write(path, data)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Parser, Debug)]
#[command(name = "strat", version, about = "Stratified bundles on affine space over F_p")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value = "text", global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Truncation {
    /// Level L: operators of order below p^L.
    #[arg(long)]
    pub level: usize,
    /// Degree cap D.
    #[arg(long)]
    pub degree: u32,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a bundle file.
    Validate { file: String },
    /// Apply the stratification to the standard basis or to --vector.
    Action {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        index: Vec<u32>,
        /// Comma-separated polynomial entries.
        #[arg(long)]
        vector: Option<String>,
    },
    /// p-curvature of the connection field, or of the first level.
    Pcurvature { file: String },
    /// Build a tower from the stratification or the connection field.
    Descend {
        file: String,
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Truncated horizontal sections.
    H0 {
        file: String,
        #[command(flatten)]
        trunc: Truncation,
    },
    /// Gauss-Manin pushforward to the base.
    Gm {
        file: String,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        max_degree: Option<usize>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Restrict to the fiber over a base point.
    Fiber {
        file: String,
        #[arg(long, value_delimiter = ',', required = true)]
        at: Vec<u32>,
        #[arg(long)]
        output: Option<String>,
    },
    /// Fiberwise truncated H^0 dimensions at every F_p-point.
    Scan {
        file: String,
        #[command(flatten)]
        trunc: Truncation,
        /// Write the table as TSV.
        #[arg(long)]
        output: Option<String>,
    },
    /// Compare Gauss-Manin generators with fiber sections at every point.
    Basechange {
        file: String,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Level-wise tensor product.
    Tensor {
        a: String,
        b: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// Dual tower.
    Dual {
        a: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// External product on disjoint variables.
    External {
        a: String,
        b: String,
        #[arg(long)]
        output: Option<String>,
    },
    /// Maximal sub-bundle pulled back from the base.
    Maxsub {
        file: String,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Re-run the bundled golden examples.
    Selftest {
        /// Run only cases whose name contains this string.
        #[arg(long)]
        filter: Option<String>,
        /// Read goldens from this directory instead of the built-in copies.
        #[arg(long)]
        golden_dir: Option<PathBuf>,
        /// Rewrite the goldens in --golden-dir from the current output.
        #[arg(long, requires = "golden_dir")]
        bless: bool,
    },
}

macro_rules! by_prime {
    ($p:expr, $($func:ident)::+, $($arg:expr),*) => {
        match $p {
            2 => $($func)::+::<F2>($($arg),*),
            3 => $($func)::+::<F3>($($arg),*),
            5 => $($func)::+::<F5>($($arg),*),
            7 => $($func)::+::<F7>($($arg),*),
            other => Err(Failure::new("validation", format!("unsupported prime {other}"))),
        }
    };
}

fn cap_value(explicit: Option<usize>, env: Option<usize>) -> (Option<usize>, Value) {
    match explicit.or(env) {
        Some(d) => (Some(d), json!(d)),
        None => (None, json!("auto")),
    }
}

struct Inputs {
    bundles: Vec<Bundle>,
    digest: String,
}

fn load(io: &dyn Io, paths: &[&str]) -> Result<Inputs, (String, Failure)> {
    let mut raw = Vec::new();
    for p in paths {
        let bytes = io.read(p).map_err(|e| (digest(&[]), Failure::new("io", format!("cannot read {p}: {e}"))))?;
        raw.push(bytes);
    }
    let refs: Vec<&[u8]> = raw.iter().map(Vec::as_slice).collect();
    let d = digest(&refs);
    let bundles = raw
        .iter()
        .zip(paths)
        .map(|(b, p)| parse_bundle(b).map_err(|f| Failure { message: format!("{p}: {}", f.message), ..f }))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|f| (d.clone(), f))?;
    Ok(Inputs { bundles, digest: d })
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Action { .. } => "action",
        Command::Pcurvature { .. } => "pcurvature",
        Command::Descend { .. } => "descend",
        Command::H0 { .. } => "h0",
        Command::Gm { .. } => "gm",
        Command::Fiber { .. } => "fiber",
        Command::Scan { .. } => "scan",
        Command::Basechange { .. } => "basechange",
        Command::Tensor { .. } => "tensor",
        Command::Dual { .. } => "dual",
        Command::External { .. } => "external",
        Command::Maxsub { .. } => "maxsub",
        Command::Selftest { .. } => "selftest",
    }
}

fn trunc_params(t: &Truncation) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("level".into(), json!(t.level));
    m.insert("degree".into(), json!(t.degree));
    m
}

/// Run one file-based command; returns the report and an optional output.
fn execute(command: &Command, io: &dyn Io, env_cap: Option<usize>) -> (Report, Option<(String, String)>) {
    let name = command_name(command);
    let mut params = Map::new();
    let (paths, output): (Vec<&str>, Option<&String>) = match command {
        Command::Validate { file } | Command::Pcurvature { file } => (vec![file], None),
        Command::Action { file, .. } | Command::H0 { file, .. } | Command::Basechange { file, .. } => {
            (vec![file], None)
        }
        Command::Maxsub { file, .. } => (vec![file], None),
        Command::Descend { file, output, .. }
        | Command::Gm { file, output, .. }
        | Command::Fiber { file, output, .. }
        | Command::Scan { file, output, .. } => (vec![file], output.as_ref()),
        Command::Tensor { a, b, output } | Command::External { a, b, output } => (vec![a, b], output.as_ref()),
        Command::Dual { a, output } => (vec![a], output.as_ref()),
        Command::Selftest { .. } => unreachable!("handled by run"),
    };
    let inputs = match load(io, &paths) {
        Ok(i) => i,
        Err((d, f)) => return (Report::failed(name, d, params, f), None),
    };
    let bs = &inputs.bundles;
    let p = bs[0].p;
    let result: Result<Done, Failure> = match command {
        Command::Validate { .. } => by_prime!(p, commands::validate, &bs[0]),
        Command::Action { index, vector, .. } => {
            params.insert("index".into(), json!(index));
            if let Some(v) = vector {
                params.insert("vector".into(), json!(v));
            }
            by_prime!(p, commands::action, &bs[0], index, vector.as_deref())
        }
        Command::Pcurvature { .. } => by_prime!(p, commands::pcurvature, &bs[0]),
        Command::Descend { levels, max_degree, .. } => {
            let (cap, v) = cap_value(*max_degree, env_cap);
            params.insert("levels".into(), json!(levels));
            params.insert("max_degree".into(), v);
            by_prime!(p, commands::descend, &bs[0], *levels, cap)
        }
        Command::H0 { trunc, .. } => {
            params = trunc_params(trunc);
            by_prime!(p, commands::h0, &bs[0], trunc.level, trunc.degree)
        }
        Command::Gm { trunc, max_degree, .. } => {
            params = trunc_params(trunc);
            let (cap, v) = cap_value(*max_degree, env_cap);
            params.insert("max_degree".into(), v);
            by_prime!(p, commands::gm, &bs[0], trunc.level, trunc.degree, cap)
        }
        Command::Fiber { at, .. } => {
            params.insert("at".into(), json!(at));
            by_prime!(p, commands::fiber, &bs[0], at)
        }
        Command::Scan { trunc, .. } => {
            params = trunc_params(trunc);
            by_prime!(p, commands::scan, &bs[0], trunc.level, trunc.degree)
        }
        Command::Basechange { trunc, max_degree, .. } => {
            params = trunc_params(trunc);
            let (cap, v) = cap_value(*max_degree, env_cap);
            params.insert("max_degree".into(), v);
            by_prime!(p, commands::basechange, &bs[0], trunc.level, trunc.degree, cap)
        }
        Command::Maxsub { trunc, max_degree, .. } => {
            params = trunc_params(trunc);
            let (cap, v) = cap_value(*max_degree, env_cap);
            params.insert("max_degree".into(), v);
            by_prime!(p, commands::maxsub, &bs[0], trunc.level, trunc.degree, cap)
        }
        Command::Tensor { .. } => by_prime!(p, commands::tensor, &bs[0], &bs[1]),
        Command::Dual { .. } => by_prime!(p, commands::dual, &bs[0]),
        Command::External { .. } => by_prime!(p, commands::external, &bs[0], &bs[1]),
        Command::Selftest { .. } => unreachable!(),
    };
    params.insert("p".into(), json!(p));
    match result {
        Ok(done) => {
            let report = Report {
                command: name.into(),
                input_digest: inputs.digest,
                parameters: params,
                findings: done.findings,
                status: done.status,
                error_kind: None,
            };
            let out = output.zip(done.output).map(|(path, data)| (path.clone(), data));
            (report, out)
        }
        Err(f) => (Report::failed(name, inputs.digest, params, f), None),
    }
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.render_json(),
        Format::Text => report.render_text(),
    }
}

/// Parse `args` (without the program name), run, and collect the output.
/// `env_cap` is the global degree cap from the environment, if any.
pub fn run(args: &[String], io: &dyn Io, env_cap: Option<usize>) -> Outcome {
    let cli = match Cli::try_parse_from(std::iter::once("strat".to_string()).chain(args.iter().cloned())) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: text },
            };
        }
    };
    let (report, output) = match &cli.command {
        Command::Selftest { filter, golden_dir, bless } => {
            (selftest::run_selftest(filter.as_deref(), golden_dir.as_deref(), *bless), None)
        }
        other => execute(other, io, env_cap),
    };
    let mut report = report;
    if let Some((path, data)) = output {
        if let Err(e) = io.write(&path, data.as_bytes()) {
            report = Report::failed(
                &report.command,
                report.input_digest.clone(),
                report.parameters.clone(),
                Failure::new("io", format!("cannot write {path}: {e}")),
            );
        }
    }
    let stdout = render(&report, cli.format);
    let stderr = if report.status == Status::Ok { String::new() } else { report.render_text() };
    Outcome { code: report.status.exit_code(), stdout, stderr }
}
