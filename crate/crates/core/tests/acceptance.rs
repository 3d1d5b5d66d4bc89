//! The acceptance suite: every criterion once, then a second pass with a
//! different worker count compared against the first. Prints one PASS/FAIL
//! line per criterion and fails if any criterion fails.

use std::process::ExitCode;

use orbitstat::harness::{run, ExperimentConfig};

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let mut config = ExperimentConfig::load(None, Some("accept"), &[]).expect("default accept config");
    config.out = Some(dir.path().join("accept"));
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("acceptance suite could not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    if outcome.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
