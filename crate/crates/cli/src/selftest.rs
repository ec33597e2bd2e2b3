//! Golden-file self-test over the bundled example files.

use std::io;
use std::path::Path;

use serde_json::{json, Map, Value};

use crate::bundle::{parse_bundle, serialize_bundle};
use crate::report::{digest, Report, Status};
use crate::{run, Io};

/// Example bundles shipped with the binary, by file name.
pub const DATA: &[(&str, &str)] = &[
    ("identity_rank2.json", include_str!("../data/identity_rank2.json")),
    ("bad_det.json", include_str!("../data/bad_det.json")),
    ("nonflat_rank1.json", include_str!("../data/nonflat_rank1.json")),
    ("cap_hit.json", include_str!("../data/cap_hit.json")),
    ("gm_rank2.json", include_str!("../data/gm_rank2.json")),
    ("pullback.json", include_str!("../data/pullback.json")),
    ("base_s.json", include_str!("../data/base_s.json")),
    ("relative_scan.json", include_str!("../data/relative_scan.json")),
];

pub enum Check {
    /// Run the arguments and compare exit code and text output.
    Command(&'static [&'static str]),
    /// Parse, canonicalize and serialize a data file; it must be unchanged.
    RoundTrip(&'static str),
}

pub struct Case {
    pub name: &'static str,
    pub check: Check,
}

pub const CASES: &[Case] = &[
    Case { name: "validate_identity", check: Check::Command(&["validate", "identity_rank2.json"]) },
    Case { name: "validate_bad_det", check: Check::Command(&["validate", "bad_det.json"]) },
    Case { name: "action_gm_rank2", check: Check::Command(&["action", "gm_rank2.json", "--index", "2,1"]) },
    Case { name: "pcurvature_nonflat", check: Check::Command(&["pcurvature", "nonflat_rank1.json"]) },
    Case { name: "descend_nonflat", check: Check::Command(&["descend", "nonflat_rank1.json", "--levels", "2"]) },
    Case {
        name: "descend_cap_hit",
        check: Check::Command(&["descend", "cap_hit.json", "--levels", "1", "--max-degree", "0"]),
    },
    Case { name: "descend_cap_ok", check: Check::Command(&["descend", "cap_hit.json", "--levels", "2"]) },
    Case {
        name: "h0_identity",
        check: Check::Command(&["h0", "identity_rank2.json", "--level", "2", "--degree", "3"]),
    },
    Case {
        name: "h0_level_exceeded",
        check: Check::Command(&["h0", "identity_rank2.json", "--level", "3", "--degree", "3"]),
    },
    Case { name: "gm_rank2", check: Check::Command(&["gm", "gm_rank2.json", "--level", "3", "--degree", "3"]) },
    Case {
        name: "gm_rank2_unstable",
        check: Check::Command(&["gm", "gm_rank2.json", "--level", "1", "--degree", "3"]),
    },
    Case { name: "gm_pullback", check: Check::Command(&["gm", "pullback.json", "--level", "2", "--degree", "1"]) },
    Case { name: "gm_file_roundtrip", check: Check::RoundTrip("gm_rank2.json") },
    Case { name: "fiber_rank2_at_1", check: Check::Command(&["fiber", "gm_rank2.json", "--at", "1"]) },
    Case {
        name: "scan_relative",
        check: Check::Command(&["scan", "relative_scan.json", "--level", "1", "--degree", "1"]),
    },
    Case { name: "scan_gm_rank2", check: Check::Command(&["scan", "gm_rank2.json", "--level", "3", "--degree", "3"]) },
    Case {
        name: "basechange_pullback",
        check: Check::Command(&["basechange", "pullback.json", "--level", "2", "--degree", "1"]),
    },
    Case {
        name: "maxsub_gm_rank2",
        check: Check::Command(&["maxsub", "gm_rank2.json", "--level", "3", "--degree", "3"]),
    },
    Case { name: "tensor_pullback", check: Check::Command(&["tensor", "pullback.json", "pullback.json"]) },
    Case { name: "dual_gm_rank2", check: Check::Command(&["dual", "gm_rank2.json"]) },
    Case { name: "external_identity_base", check: Check::Command(&["external", "identity_rank2.json", "base_s.json"]) },
];

/// Goldens built into the binary.
pub const GOLDEN: &[(&str, &str)] = &[
    ("validate_identity", include_str!("../golden/validate_identity.txt")),
    ("validate_bad_det", include_str!("../golden/validate_bad_det.txt")),
    ("action_gm_rank2", include_str!("../golden/action_gm_rank2.txt")),
    ("pcurvature_nonflat", include_str!("../golden/pcurvature_nonflat.txt")),
    ("descend_nonflat", include_str!("../golden/descend_nonflat.txt")),
    ("descend_cap_hit", include_str!("../golden/descend_cap_hit.txt")),
    ("descend_cap_ok", include_str!("../golden/descend_cap_ok.txt")),
    ("h0_identity", include_str!("../golden/h0_identity.txt")),
    ("h0_level_exceeded", include_str!("../golden/h0_level_exceeded.txt")),
    ("gm_rank2", include_str!("../golden/gm_rank2.txt")),
    ("gm_rank2_unstable", include_str!("../golden/gm_rank2_unstable.txt")),
    ("gm_pullback", include_str!("../golden/gm_pullback.txt")),
    ("gm_file_roundtrip", include_str!("../golden/gm_file_roundtrip.txt")),
    ("fiber_rank2_at_1", include_str!("../golden/fiber_rank2_at_1.txt")),
    ("scan_relative", include_str!("../golden/scan_relative.txt")),
    ("scan_gm_rank2", include_str!("../golden/scan_gm_rank2.txt")),
    ("basechange_pullback", include_str!("../golden/basechange_pullback.txt")),
    ("maxsub_gm_rank2", include_str!("../golden/maxsub_gm_rank2.txt")),
    ("tensor_pullback", include_str!("../golden/tensor_pullback.txt")),
    ("dual_gm_rank2", include_str!("../golden/dual_gm_rank2.txt")),
    ("external_identity_base", include_str!("../golden/external_identity_base.txt")),
];

/// Read-only access to [`DATA`].
pub struct Embedded;

impl Io for Embedded {
    fn read(&self, path: &str) -> io::Result<Vec<u8>> {
        DATA.iter()
            .find(|(n, _)| *n == path)
            .map(|(_, d)| d.as_bytes().to_vec())
            .ok_or_else(|| io::Error::new(io::ErrorKind::NotFound, path.to_string()))
    }

    fn write(&self, path: &str, _: &[u8]) -> io::Result<()> {
        Err(io::Error::new(io::ErrorKind::PermissionDenied, path.to_string()))
    }
}

fn round_trip(file: &str) -> String {
    let raw = Embedded.read(file).expect("bundled file");
    let canonical = parse_bundle(&raw).and_then(|b| match b.p {
        2 => b.canonical::<strat_core::F2>(),
        3 => b.canonical::<strat_core::F3>(),
        5 => b.canonical::<strat_core::F5>(),
        _ => b.canonical::<strat_core::F7>(),
    });
    match canonical {
        Ok(b) if serialize_bundle(&b).as_bytes() == raw.as_slice() => "round trip: identical\n".into(),
        Ok(_) => "round trip: changed\n".into(),
        Err(f) => format!("round trip: {}: {}\n", f.kind, f.message),
    }
}

/// Output of one case in golden form.
pub fn case_output(case: &Case) -> String {
    match &case.check {
        Check::Command(args) => {
            let mut argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            argv.extend(["--format".to_string(), "text".to_string()]);
            let out = run(&argv, &Embedded, None);
            format!("exit: {}\n{}", out.code, out.stdout)
        }
        Check::RoundTrip(file) => round_trip(file),
    }
}

pub fn run_selftest(filter: Option<&str>, golden_dir: Option<&Path>, bless: bool) -> Report {
    let mut cases = Vec::new();
    let (mut passed, mut failed) = (0, 0);
    for case in CASES.iter().filter(|c| filter.is_none_or(|f| c.name.contains(f))) {
        let actual = case_output(case);
        let golden_path = golden_dir.map(|d| d.join(format!("{}.txt", case.name)));
        let (result, detail) = if bless {
            let path = golden_path.expect("bless requires a golden directory");
            match std::fs::write(&path, &actual) {
                Ok(()) => ("blessed", path.display().to_string()),
                Err(e) => ("fail", format!("cannot write {}: {e}", path.display())),
            }
        } else {
            let expected = match &golden_path {
                Some(path) => std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display())),
                None => GOLDEN
                    .iter()
                    .find(|(n, _)| *n == case.name)
                    .map(|(_, g)| g.to_string())
                    .ok_or_else(|| "no built-in golden".to_string()),
            };
            match expected {
                Ok(g) if g == actual => ("pass", String::new()),
                Ok(g) => ("fail", first_difference(&g, &actual)),
                Err(e) => ("fail", e),
            }
        };
        if result == "fail" {
            failed += 1;
        } else {
            passed += 1;
        }
        cases.push(json!({ "name": case.name, "result": result, "detail": detail }));
    }
    let data: Vec<&[u8]> = DATA.iter().map(|(_, d)| d.as_bytes()).collect();
    let mut params = Map::new();
    params.insert("filter".into(), filter.map_or(Value::Null, |f| json!(f)));
    params.insert("bless".into(), json!(bless));
    let status = if failed == 0 { Status::Ok } else { Status::Error };
    Report {
        command: "selftest".into(),
        input_digest: digest(&data),
        parameters: params,
        findings: json!({ "cases": cases, "passed": passed, "failed": failed }),
        status,
        error_kind: (failed > 0).then(|| "selftest".to_string()),
    }
}

fn first_difference(expected: &str, actual: &str) -> String {
    for (i, (e, a)) in expected.lines().zip(actual.lines()).enumerate() {
        if e != a {
            return format!("line {}: expected {e:?}, got {a:?}", i + 1);
        }
    }
    format!("length differs: expected {} lines, got {}", expected.lines().count(), actual.lines().count())
}
