//! Running an experiment from a TOML configuration, verifying the manifest
//! and comparing two runs made with different worker counts.
//!
//! `cargo run --release --example harness_run`

use orbitstat::harness::{compare_runs, run, verify, ExperimentConfig};

const CONFIG: &str = r#"
experiment = "report"
model = "projective-line"
t_grid = [4.0, 4.5, 5.0, 5.5, 6.0, 6.5]
seed = 3

[points]
count = 2
region = [[0.0, 3.14]]

[phi]
kind = "tensor-bump"
center = [1.0]
half_width = [0.3]
"#;

fn main() -> orbitstat::Result<()> {
    let dir = tempfile::tempdir()?;
    let mut dirs = Vec::new();
    for workers in [1, 2] {
        let mut config = ExperimentConfig::from_toml_str(CONFIG)?;
        config.workers = workers;
        let out = dir.path().join(format!("w{workers}"));
        config.out = Some(out.clone());
        let outcome = run(&config)?;
        for line in &outcome.lines {
            println!("{line}");
        }
        println!("outputs: {:?}", outcome.manifest.outputs.keys().collect::<Vec<_>>());
        dirs.push(out);
    }
    let manifest = verify(&dirs[0])?;
    println!("verified {} digests, config hash {}", manifest.outputs.len(), manifest.config_hash);
    let diff = compare_runs(&dirs[0], &dirs[1])?;
    println!("runs agree: {}", diff.is_clean());
    Ok(())
}
