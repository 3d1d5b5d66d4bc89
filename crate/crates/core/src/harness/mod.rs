//! Experiment orchestration: runs a config on a dedicated worker pool,
//! writes result files with a manifest, verifies digests and compares runs.
//!
//! Every run directory holds the resolved `config.toml`, the result files and
//! `manifest.json` with their SHA-256 digests.

pub mod accept;
pub mod config;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use config::{parse_override, Experiment, ExperimentConfig};

use crate::arith::dump::write_ball;
use crate::arith::{ball_counts, enumerate_ball};
use crate::gauge::Height;
use crate::sampling::{self, NormalizationMode, SumOptions};
use crate::stats::linear_slope;
use crate::volumes::{self, GrowthFit, VolumeSample};
use crate::{Error, Result};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "config.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub experiment: Experiment,
    /// SHA-256 of the resolved `config.toml`.
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub workers: usize,
    pub started_unix: u64,
    pub wall_clock_seconds: f64,
    pub stages: Vec<StageTiming>,
    /// Result file name → SHA-256.
    pub outputs: BTreeMap<String, String>,
}

/// What a run produced besides its files.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: RunManifest,
    pub dir: Option<PathBuf>,
    /// Lines for standard output.
    pub lines: Vec<String>,
    /// False when an acceptance criterion failed.
    pub passed: bool,
    /// Acceptance results, for `accept` runs.
    pub criteria: Vec<accept::CriterionResult>,
}

/// Output sink of one run: files in a directory, digested at the end.
pub struct RunContext {
    dir: Option<PathBuf>,
    outputs: BTreeMap<String, String>,
    stages: Vec<StageTiming>,
    seeds: BTreeSet<u64>,
    pub budget: config::BudgetConfig,
}

impl RunContext {
    pub fn new(dir: Option<PathBuf>, budget: config::BudgetConfig) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d)?;
        }
        Ok(Self {
            dir,
            outputs: BTreeMap::new(),
            stages: Vec::new(),
            seeds: BTreeSet::new(),
            budget,
        })
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Sum options carrying the element budget and a fresh stage deadline.
    pub fn sum_options(&self) -> SumOptions {
        SumOptions {
            max_elements: self.budget.max_elements,
            deadline: Some(Instant::now() + Duration::from_secs_f64(self.budget.max_stage_seconds)),
        }
    }

    pub fn record_seed(&mut self, seed: u64) {
        self.seeds.insert(seed);
    }

    pub fn push_stage(&mut self, name: &str, seconds: f64) {
        self.stages.push(StageTiming { name: name.to_string(), seconds });
    }

    /// Runs `f` as a named, timed stage.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f(self);
        self.push_stage(name, start.elapsed().as_secs_f64());
        out
    }

    /// Writes a result file (skipped when the run has no directory).
    pub fn write_file(&mut self, name: &str, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let path = dir.join(name);
        {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            f(&mut w)?;
            w.flush()?;
        }
        self.outputs.insert(name.to_string(), file_digest(&path)?);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write_file(name, |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }
}

pub fn file_digest(path: &Path) -> Result<String> {
    Ok(hex::encode(Sha256::digest(fs::read(path)?)))
}

/// Worker pool of the given size (0: machine default).
pub fn worker_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))
}

/// Default output directory of an experiment.
pub fn default_out(experiment: Experiment) -> PathBuf {
    PathBuf::from("orbitstat-out").join(experiment.name())
}

/// Executes the configured experiment. Files go to `config.out`, or nowhere
/// for `enum-ball --count-only` without an explicit directory.
pub fn run(config: &ExperimentConfig) -> Result<RunOutcome> {
    config.validate()?;
    let dir = match (&config.out, config.experiment, config.count_only) {
        (Some(d), _, _) => Some(d.clone()),
        (None, Experiment::EnumBall, true) => None,
        (None, e, _) => Some(default_out(e)),
    };
    let started = Instant::now();
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let resolved = config.to_toml()?;
    let config_hash = hex::encode(Sha256::digest(resolved.as_bytes()));
    if let Some(d) = &dir {
        fs::create_dir_all(d)?;
        fs::write(d.join(CONFIG_FILE), &resolved)?;
    }
    let mut ctx = RunContext::new(dir.clone(), config.budget.clone())?;
    ctx.record_seed(config.seed);
    let pool = worker_pool(config.workers)?;
    let workers = pool.current_num_threads();
    let (lines, passed, criteria) = pool.install(|| execute(config, &mut ctx))?;
    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: config.experiment,
        config_hash,
        seeds: ctx.seeds.iter().copied().collect(),
        workers,
        started_unix,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        stages: ctx.stages.clone(),
        outputs: ctx.outputs.clone(),
    };
    if let Some(d) = &dir {
        fs::write(d.join(MANIFEST_FILE), serde_json::to_string_pretty(&manifest)? + "\n")?;
    }
    Ok(RunOutcome { manifest, dir, lines, passed, criteria })
}

#[derive(Serialize)]
struct GrowthSummary<'a> {
    lattice: String,
    t_grid: &'a [f64],
    log_slope: f64,
    fit: Option<GrowthFit>,
    fit_error: Option<String>,
}

#[derive(Serialize)]
struct VolumesSummary {
    model: String,
    gauge: String,
    seed: u64,
    fit: Option<GrowthFit>,
    fit_error: Option<String>,
}

fn execute(cfg: &ExperimentConfig, ctx: &mut RunContext) -> Result<(Vec<String>, bool, Vec<accept::CriterionResult>)> {
    let ts = cfg.heights();
    let mut lines = Vec::new();
    match cfg.experiment {
        Experiment::EnumBall => {
            let spec = cfg.group_spec()?;
            let heights: Vec<Height> = ts.iter().map(|&t| Height(t)).collect();
            let counts = ctx.stage("count", |_| ball_counts(&spec, &heights))?;
            lines.extend(counts.iter().map(u128::to_string));
            let lattice = sampling::lattice_id(&spec);
            ctx.write_file("ball_counts.csv", |w| {
                writeln!(w, "lattice,t,count")?;
                for (t, c) in ts.iter().zip(&counts) {
                    writeln!(w, "{lattice},{t},{c}")?;
                }
                Ok(())
            })?;
            if !cfg.count_only {
                let t = *ts.last().expect("validated");
                let ball = ctx.stage("enumerate", |_| enumerate_ball(&spec, Height(t)))?;
                ctx.write_file("ball.txt", |w| write_ball(w, spec.family, t, &ball.elements))?;
            }
        }
        Experiment::Growth => {
            let spec = cfg.group_spec()?;
            let heights: Vec<Height> = ts.iter().map(|&t| Height(t)).collect();
            let counts = ctx.stage("count", |_| ball_counts(&spec, &heights))?;
            let lattice = sampling::lattice_id(&spec);
            let logs: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
            ctx.write_file("growth.csv", |w| {
                writeln!(w, "lattice,t,count,log_count")?;
                for ((t, c), l) in ts.iter().zip(&counts).zip(&logs) {
                    writeln!(w, "{lattice},{t},{c},{l}")?;
                }
                Ok(())
            })?;
            let log_slope = if ts.len() >= 2 { linear_slope(&ts, &logs)?.coefficients[0] } else { f64::NAN };
            let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
            let (fit, fit_error) = split(volumes::fit_growth_series(&ts, &values));
            lines.push(format!("log-count slope {log_slope:.4}"));
            if let Some(f) = &fit {
                lines.push(format!("fit a = {:.4}, b = {}", f.a_hat, f.b_hat));
            }
            ctx.write_json("growth.json", &GrowthSummary { lattice, t_grid: &ts, log_slope, fit, fit_error })?;
        }
        Experiment::Volumes => {
            let model = cfg.stabilizer_model()?;
            let samples = ctx.stage("volumes", |_| {
                let mut out: Vec<VolumeSample> = Vec::new();
                for &t in &ts {
                    out.push(volumes::haar_ball_volume(&model, t)?);
                }
                for (i, pair) in cfg.volumes.pairs.iter().enumerate() {
                    let g1 = ExperimentConfig::section(&model, &pair.g1, &format!("volumes.pairs[{i}].g1"))?;
                    let g2 = ExperimentConfig::section(&model, &pair.g2, &format!("volumes.pairs[{i}].g2"))?;
                    for &t in &ts {
                        out.push(volumes::skew_ball_volume(&model, &g1, &g2, t)?.with_ids(&section_id(&pair.g1), &section_id(&pair.g2)));
                    }
                }
                Ok(out)
            })?;
            ctx.write_file("volumes.csv", |w| volumes::write_volume_csv(w, &samples))?;
            let haar: Vec<VolumeSample> = samples.iter().filter(|s| s.g1_id == "id" && s.g2_id == "id").cloned().collect();
            let (fit, fit_error) = split(volumes::fit_growth(&haar));
            if let Some(f) = &fit {
                lines.push(format!("fit a = {:.4}, b = {}", f.a_hat, f.b_hat));
            }
            ctx.write_json("volumes.json", &VolumesSummary {
                model: model.kind.name().to_string(),
                gauge: model.gauge_id(),
                seed: model.seed,
                fit,
                fit_error,
            })?;
        }
        Experiment::Theta => {
            let model = cfg.stabilizer_model()?;
            let t = *ts.last().expect("validated");
            let rows = ctx.stage("theta", |_| {
                cfg.volumes
                    .pairs
                    .iter()
                    .enumerate()
                    .map(|(i, pair)| {
                        let g1 = ExperimentConfig::section(&model, &pair.g1, &format!("volumes.pairs[{i}].g1"))?;
                        let g2 = ExperimentConfig::section(&model, &pair.g2, &format!("volumes.pairs[{i}].g2"))?;
                        Ok((section_id(&pair.g1), section_id(&pair.g2), volumes::theta_estimate(&model, &g1, &g2, t)?))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            for (a, b, th) in &rows {
                lines.push(format!("theta({a}, {b}) = {:.6} ± {:.2e}", th.value, th.stderr));
            }
            let (name, gauge) = (model.kind.name(), model.gauge_id());
            ctx.write_file("theta.csv", |w| {
                writeln!(w, "model,gauge,g1_id,g2_id,t_max,value,stderr,previous,relative_change,stabilized")?;
                for (a, b, th) in &rows {
                    writeln!(
                        w,
                        "{name},{gauge},{a},{b},{},{},{},{},{},{}",
                        th.t_max, th.value, th.stderr, th.previous, th.relative_change, th.stabilized
                    )?;
                }
                Ok(())
            })?;
        }
        Experiment::Orbit | Experiment::Ratio | Experiment::Report => {
            let model = cfg.space_model()?;
            let points = cfg.base_points(&model)?;
            let mut phis = vec![cfg.phi.clone().expect("validated")];
            if cfg.experiment == Experiment::Ratio {
                phis.push(cfg.psi.clone().expect("validated"));
            }
            let x_ids: Vec<String> = (0..points.len()).map(|i| format!("x{i}")).collect();
            let phi_ids: Vec<String> = phis.iter().map(|f| f.id()).collect();
            let mode = cfg.normalization;
            let opts = ctx.sum_options();
            let sums = ctx.stage("orbit-sums", |_| sampling::best_sums(&model, &points, &phis, &ts, opts))?;
            let rows = sampling::report_rows(&model, &sums, &x_ids, &phi_ids, mode)?;
            ctx.write_file("report.csv", |w| sampling::write_report_csv(w, &rows))?;
            ctx.write_json("points.json", &points)?;
            match cfg.experiment {
                Experiment::Orbit => {
                    let k = ts.len() - 1;
                    let norm = sampling::normalizer(&model, mode, ts[k])?;
                    for p in 0..points.len() {
                        lines.push(format!("{} t={} average {:.6}", x_ids[p], ts[k], sums.raw_sum(p, 0, k) / norm));
                    }
                }
                Experiment::Ratio => {
                    let lattice = sampling::lattice_id(&model.spec);
                    let mut out = Vec::new();
                    for p in 0..points.len() {
                        for (k, &t) in ts.iter().enumerate() {
                            let r = sampling::ratio_from_sums(&sums, p, 0, 1, k).ok();
                            out.push((p, t, r));
                        }
                    }
                    for (p, t, r) in out.iter().filter(|(_, t, _)| *t == ts[ts.len() - 1]) {
                        lines.push(format!("{} t={t} ratio {}", x_ids[*p], r.map_or("undefined".into(), |v| format!("{v:.6}"))));
                    }
                    ctx.write_file("ratio.csv", |w| {
                        writeln!(w, "model,lattice,x_id,phi_id,psi_id,t,ratio")?;
                        for (p, t, r) in &out {
                            let r = r.map(|v| v.to_string()).unwrap_or_default();
                            writeln!(w, "{},{lattice},{},{},{},{t},{r}", model.id(), x_ids[*p], phi_ids[0], phi_ids[1])?;
                        }
                        Ok(())
                    })?;
                }
                _ => {
                    let reports = points
                        .iter()
                        .enumerate()
                        .map(|(p, x)| sampling::report_from_sums(&model, x, &phi_ids[0], &sums, p, 0, mode))
                        .collect::<Result<Vec<_>>>()?;
                    for (id, r) in x_ids.iter().zip(&reports) {
                        lines.push(format!(
                            "{id} limit {:.6} rate {} ({:.4})",
                            r.fitted_limit,
                            r.rate.model.name(),
                            r.rate.parameter
                        ));
                    }
                    #[derive(Serialize)]
                    struct ReportFile<'a> {
                        seed: u64,
                        normalization: NormalizationMode,
                        reports: &'a [sampling::ConvergenceReport],
                    }
                    ctx.write_json("report.json", &ReportFile { seed: cfg.seed, normalization: mode, reports: &reports })?;
                }
            }
        }
        Experiment::Accept => {
            let results = accept::run_acceptance(cfg, ctx)?;
            let passed = results.iter().all(|r| r.passed);
            lines.extend(results.iter().map(|r| r.line()));
            lines.push(format!(
                "{} of {} criteria passed",
                results.iter().filter(|r| r.passed).count(),
                results.len()
            ));
            return Ok((lines, passed, results));
        }
    }
    Ok((lines, true, Vec::new()))
}

fn split<T>(r: Result<T>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

fn section_id(params: &[f64]) -> String {
    if params.is_empty() {
        "id".to_string()
    } else {
        let v: Vec<String> = params.iter().map(|x| x.to_string()).collect();
        format!("s[{}]", v.join(":"))
    }
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    Ok(serde_json::from_str(&text)?)
}

/// Recomputes the output digests of a run directory.
pub fn verify(dir: &Path) -> Result<RunManifest> {
    let manifest = read_manifest(dir)?;
    let mut bad = Vec::new();
    for (name, digest) in &manifest.outputs {
        match file_digest(&dir.join(name)) {
            Ok(d) if &d == digest => {}
            Ok(_) => bad.push(format!("{name}: digest differs")),
            Err(e) => bad.push(format!("{name}: {e}")),
        }
    }
    let config = fs::read(dir.join(CONFIG_FILE))?;
    if hex::encode(Sha256::digest(&config)) != manifest.config_hash {
        bad.push(format!("{CONFIG_FILE}: hash differs"));
    }
    if bad.is_empty() {
        Ok(manifest)
    } else {
        Err(Error::Mismatch(bad.join("; ")))
    }
}

/// One differing value (or file) between two runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffEntry {
    pub file: String,
    /// 1-based data row, 0 for file-level differences.
    pub row: usize,
    pub column: String,
    pub a: String,
    pub b: String,
    pub relative_difference: Option<f64>,
    /// Allowed absolute difference, for Monte Carlo columns.
    pub tolerance: Option<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffReport {
    pub experiment: Experiment,
    pub entries: Vec<DiffEntry>,
}

impl DiffReport {
    /// No difference beyond tolerance.
    pub fn is_clean(&self) -> bool {
        self.entries.iter().all(|e| !e.flagged)
    }
}

/// Compares the result files of two run directories of the same experiment.
/// Values must be bit-identical, except in rows that carry a `stderr`
/// column, where numeric values may differ by three combined standard
/// errors.
pub fn compare_runs(dir_a: &Path, dir_b: &Path) -> Result<DiffReport> {
    let ma = read_manifest(dir_a)?;
    let mb = read_manifest(dir_b)?;
    if ma.experiment != mb.experiment {
        return Err(Error::Mismatch(format!(
            "cannot compare a {} run with a {} run",
            ma.experiment, mb.experiment
        )));
    }
    let names: BTreeSet<&String> = ma.outputs.keys().chain(mb.outputs.keys()).collect();
    let mut entries = Vec::new();
    for name in names {
        let file_entry = |a: &str, b: &str| DiffEntry {
            file: name.clone(),
            row: 0,
            column: String::new(),
            a: a.to_string(),
            b: b.to_string(),
            relative_difference: None,
            tolerance: None,
            flagged: true,
        };
        if !(ma.outputs.contains_key(name) && mb.outputs.contains_key(name)) {
            let has = |m: &RunManifest| if m.outputs.contains_key(name) { "present" } else { "missing" };
            entries.push(file_entry(has(&ma), has(&mb)));
            continue;
        }
        // Digests of the files as they are now, not as recorded.
        let da = file_digest(&dir_a.join(name))?;
        let db = file_digest(&dir_b.join(name))?;
        if da == db {
            continue;
        }
        if name.ends_with(".csv") {
            let ta = fs::read_to_string(dir_a.join(name))?;
            let tb = fs::read_to_string(dir_b.join(name))?;
            diff_csv(name, &ta, &tb, &mut entries);
        } else {
            entries.push(file_entry(&da, &db));
        }
    }
    Ok(DiffReport { experiment: ma.experiment, entries })
}

fn diff_csv(name: &str, ta: &str, tb: &str, entries: &mut Vec<DiffEntry>) {
    let rows_a: Vec<Vec<&str>> = ta.lines().map(|l| l.split(',').collect()).collect();
    let rows_b: Vec<Vec<&str>> = tb.lines().map(|l| l.split(',').collect()).collect();
    let shape = |entries: &mut Vec<DiffEntry>, a: String, b: String| {
        entries.push(DiffEntry {
            file: name.to_string(),
            row: 0,
            column: "shape".into(),
            a,
            b,
            relative_difference: None,
            tolerance: None,
            flagged: true,
        })
    };
    if rows_a.first() != rows_b.first() || rows_a.len() != rows_b.len() {
        shape(entries, format!("{} rows", rows_a.len()), format!("{} rows", rows_b.len()));
        return;
    }
    let header = &rows_a[0];
    let se_col = header.iter().position(|h| *h == "stderr");
    for (i, (ra, rb)) in rows_a.iter().zip(&rows_b).enumerate().skip(1) {
        if ra.len() != rb.len() {
            shape(entries, ra.join(","), rb.join(","));
            continue;
        }
        let num = |s: &str| s.parse::<f64>().ok();
        let tol = se_col.and_then(|c| Some(3.0 * num(ra[c])?.hypot(num(rb[c])?)));
        for (j, (a, b)) in ra.iter().zip(rb).enumerate() {
            if a == b {
                continue;
            }
            let rel = match (num(a), num(b)) {
                (Some(x), Some(y)) => Some((x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE)),
                _ => None,
            };
            let column = header.get(j).copied().unwrap_or("").to_string();
            // Seeds and standard errors legitimately change with the seed.
            let within = match (num(a), num(b), tol) {
                (Some(x), Some(y), Some(tol)) => Some(j) == se_col || column == "seed" || (x - y).abs() <= tol,
                _ => false,
            };
            entries.push(DiffEntry {
                file: name.to_string(),
                row: i,
                column,
                a: a.to_string(),
                b: b.to_string(),
                relative_difference: rel,
                tolerance: tol,
                flagged: !within,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn growth_config(out: &Path, workers: usize) -> ExperimentConfig {
        ExperimentConfig::load(None, Some("growth"), &[
            ("family".into(), "sl2z".into()),
            ("t_grid".into(), "[1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5]".into()),
            ("workers".into(), workers.to_string()),
            ("out".into(), format!("\"{}\"", out.display())),
        ])
        .unwrap()
    }

    #[test]
    fn run_writes_manifest_and_verifies() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("a");
        let outcome = run(&growth_config(&out, 1)).unwrap();
        assert!(outcome.passed);
        assert!(outcome.manifest.outputs.contains_key("growth.csv"));
        assert!(out.join(CONFIG_FILE).exists());
        verify(&out).unwrap();
        fs::write(out.join("growth.csv"), "tampered\n").unwrap();
        assert!(matches!(verify(&out), Err(Error::Mismatch(_))));
    }

    #[test]
    fn worker_count_does_not_change_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a"), dir.path().join("b"));
        run(&growth_config(&a, 1)).unwrap();
        run(&growth_config(&b, 3)).unwrap();
        let diff = compare_runs(&a, &b).unwrap();
        assert!(diff.entries.is_empty(), "{diff:?}");
    }

    #[test]
    fn csv_diff_tolerates_monte_carlo_noise_only() {
        let head = "model,gauge,t,g1_id,g2_id,value,stderr,method,seed";
        let a = format!("{head}\nsl2r,f,3,id,id,10.0,0.1,monte-carlo,1\nso11,f,3,id,id,2.0,0,closed-form,\n");
        let b = format!("{head}\nsl2r,f,3,id,id,10.3,0.12,monte-carlo,2\nso11,f,3,id,id,2.5,0,closed-form,\n");
        let mut entries = Vec::new();
        diff_csv("v.csv", &a, &b, &mut entries);
        let flagged: Vec<_> = entries.iter().filter(|e| e.flagged).map(|e| (e.row, e.column.as_str())).collect();
        assert_eq!(flagged, vec![(2, "value")]);
        let c = format!("{head}\nsl2r,f,3,id,id,11.0,0.1,monte-carlo,1\nso11,f,3,id,id,2.0,0,closed-form,\n");
        entries.clear();
        diff_csv("v.csv", &a, &c, &mut entries);
        assert!(entries.iter().any(|e| e.flagged && e.column == "value"));
    }

    #[test]
    fn different_experiments_do_not_compare() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        run(&growth_config(&a, 1)).unwrap();
        let b = dir.path().join("b");
        let cfg = ExperimentConfig::load(None, Some("enum-ball"), &[
            ("family".into(), "sl2z".into()),
            ("t".into(), "2.0".into()),
            ("out".into(), format!("\"{}\"", b.display())),
        ])
        .unwrap();
        run(&cfg).unwrap();
        assert!(matches!(compare_runs(&a, &b), Err(Error::Mismatch(_))));
    }
}
