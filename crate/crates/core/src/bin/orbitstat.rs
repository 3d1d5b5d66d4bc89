//! `orbitstat <experiment> [--config FILE] [--set key=value]... [--out DIR] [--workers N] [--seed U64]`
//!
//! Also `orbitstat verify DIR` and `orbitstat compare DIR_A DIR_B`.
//! Exit codes: 0 success, 1 criterion or check failure, 2 config error,
//! 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::Parser;
use orbitstat::harness::{self, parse_override, ExperimentConfig};
use orbitstat::Error;

#[derive(Parser, Debug)]
#[command(name = "orbitstat", version, about = "Lattice orbit statistics on homogeneous spaces")]
struct Cli {
    /// enum-ball, growth, volumes, theta, orbit, ratio, report, accept,
    /// verify or compare.
    command: String,
    /// Run directories for verify and compare.
    dirs: Vec<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set points.count=20`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    /// enum-ball: print only the ball size.
    #[arg(long)]
    count_only: bool,
}

fn toml_string(s: &str) -> String {
    toml::Value::String(s.to_string()).to_string()
}

fn overrides(cli: &Cli) -> Result<Vec<(String, String)>, Error> {
    let mut out: Vec<(String, String)> = Vec::new();
    if let Some(f) = &cli.family {
        out.push(("family".into(), toml_string(f)));
    }
    if let Some(m) = &cli.model {
        out.push(("model".into(), toml_string(m)));
    }
    if let Some(t) = cli.t {
        out.push(("t".into(), format!("{t:?}")));
    }
    if cli.count_only {
        out.push(("count_only".into(), "true".into()));
    }
    if let Some(d) = &cli.out {
        out.push(("out".into(), toml_string(&d.to_string_lossy())));
    }
    if let Some(w) = cli.workers {
        out.push(("workers".into(), w.to_string()));
    }
    if let Some(s) = cli.seed {
        out.push(("seed".into(), s.to_string()));
    }
    for s in &cli.set {
        out.push(parse_override(s)?);
    }
    Ok(out)
}

fn exit_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config { .. }) => 2,
        Some(Error::Mismatch(_)) => 1,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_for(&err))
        }
    }
}

fn dispatch(cli: &Cli) -> anyhow::Result<u8> {
    match cli.command.as_str() {
        "verify" => {
            let [dir] = cli.dirs.as_slice() else {
                return Err(Error::config("verify", "expects one run directory").into());
            };
            let m = harness::verify(dir).with_context(|| format!("verifying {}", dir.display()))?;
            println!("{} outputs verified ({} run, config {})", m.outputs.len(), m.experiment, &m.config_hash[..12]);
            Ok(0)
        }
        "compare" => {
            let [a, b] = cli.dirs.as_slice() else {
                return Err(Error::config("compare", "expects two run directories").into());
            };
            let diff = harness::compare_runs(a, b)?;
            for e in &diff.entries {
                println!(
                    "{} {}:{} {} | {} vs {}",
                    if e.flagged { "DIFF" } else { "ok  " },
                    e.file,
                    e.row,
                    e.column,
                    e.a,
                    e.b
                );
            }
            println!("{} differences, {} beyond tolerance", diff.entries.len(), diff.entries.iter().filter(|e| e.flagged).count());
            Ok(if diff.is_clean() { 0 } else { 1 })
        }
        name => {
            if !cli.dirs.is_empty() {
                return Err(Error::config("command", format!("{name} takes no positional directories")).into());
            }
            let cfg = ExperimentConfig::load(cli.config.as_deref(), Some(name), &overrides(cli)?)?;
            let outcome = harness::run(&cfg).with_context(|| format!("running {name}"))?;
            for line in &outcome.lines {
                println!("{line}");
            }
            if let Some(dir) = &outcome.dir {
                eprintln!("results in {}", dir.display());
            }
            Ok(if outcome.passed { 0 } else { 1 })
        }
    }
}
