use std::io::Write;
use std::process::ExitCode;

use strat_cli::{run, FsIo};

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let env_cap = match std::env::var("STRAT_MAX_DEGREE") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(d) => Some(d),
            Err(_) => {
                eprintln!("error: STRAT_MAX_DEGREE must be a non-negative integer, got {v:?}");
                return ExitCode::from(1);
            }
        },
        Err(_) => None,
    };
    let out = run(&args, &FsIo, env_cap);
    let _ = std::io::stdout().write_all(out.stdout.as_bytes());
    let _ = std::io::stderr().write_all(out.stderr.as_bytes());
    ExitCode::from(out.code as u8)
}
