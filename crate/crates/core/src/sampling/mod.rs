//! Normalized orbit sampling `(1/V(t)) Σ_{γ∈Γ_t} φ(x·γ)`, its continuous
//! counterpart, ratio averages and convergence reports.

mod fit;
mod sums;

use std::collections::HashMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use fit::{fit_rate, select_rate, tail_limit, RateFit, RateModel};
pub use sums::{domain_restricted_sums, orbit_sums, OrbitSums, SumOptions, DEFAULT_MAX_ELEMENTS};

use crate::arith::{Family, GroupSpec};
use crate::spaces::{Point, SpaceKind, SpaceModel, TestFunction};
use crate::volumes::{self, RealMatrix, StabilizerModel};
use crate::{Error, Result};

/// How raw sums are normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationMode {
    /// `V(t) = e^{at} tᵇ` of the model.
    Model,
    /// No normalization.
    Raw,
    /// `ρ(H_t)` of the stabilizer model.
    Volume,
}

impl NormalizationMode {
    pub fn name(self) -> &'static str {
        match self {
            NormalizationMode::Model => "model",
            NormalizationMode::Raw => "raw",
            NormalizationMode::Volume => "volume",
        }
    }
}

impl std::str::FromStr for NormalizationMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "model" => Ok(NormalizationMode::Model),
            "raw" => Ok(NormalizationMode::Raw),
            "volume" => Ok(NormalizationMode::Volume),
            _ => Err(Error::config("normalization", format!("unknown normalization {s:?}"))),
        }
    }
}

/// Stabilizer whose Haar balls normalize the model's orbit sums.
pub fn stabilizer_for(model: &SpaceModel) -> Result<StabilizerModel> {
    match model.kind {
        SpaceKind::DeSitter2 => StabilizerModel::so11(3),
        SpaceKind::DeSitter3 => Ok(StabilizerModel::so12()),
        SpaceKind::AffineSl2z => StabilizerModel::sl2r(3),
        SpaceKind::ProjectiveLine => StabilizerModel::sl2r(2),
        SpaceKind::AffineSolvable => StabilizerModel::torus(*model.spec.generator()?),
        SpaceKind::PuncturedPlane => Err(Error::domain("no stabilizer volume model for the punctured plane")),
    }
}

/// `V(t)` under the chosen normalization.
pub fn normalizer(model: &SpaceModel, mode: NormalizationMode, t: f64) -> Result<f64> {
    let v = match mode {
        NormalizationMode::Raw => 1.0,
        NormalizationMode::Model => model.normalization.value(t),
        NormalizationMode::Volume => volumes::haar_ball_volume(&stabilizer_for(model)?, t)?.value,
    };
    if !(v > 0.0) {
        return Err(Error::ZeroDenominator { t });
    }
    Ok(v)
}

/// Identifier of the lattice in output files.
pub fn lattice_id(spec: &GroupSpec) -> String {
    match (spec.family, spec.generator()) {
        (Family::CyclicSolvable, Ok(g)) => {
            let m = g.matrix;
            format!("{}[{} {};{} {}]", spec.family.name(), m[0][0], m[0][1], m[1][0], m[1][1])
        }
        _ => spec.family.name().to_string(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitAverageRequest {
    pub model: SpaceModel,
    pub x: Point,
    pub phi: TestFunction,
    pub t: f64,
    pub normalization: NormalizationMode,
}

impl OrbitAverageRequest {
    pub fn new(model: SpaceModel, x: Point, phi: TestFunction, t: f64) -> Self {
        Self {
            model,
            x,
            phi,
            t,
            normalization: NormalizationMode::Model,
        }
    }

    pub fn with_normalization(mut self, mode: NormalizationMode) -> Self {
        self.normalization = mode;
        self
    }
}

/// `(1/V(t)) Σ_{γ∈Γ_t} φ(x·γ)`, streaming the whole ball.
pub fn orbit_average(req: &OrbitAverageRequest) -> Result<f64> {
    orbit_average_with(req, SumOptions::default())
}

pub fn orbit_average_with(req: &OrbitAverageRequest, opts: SumOptions) -> Result<f64> {
    let s = orbit_sums(&req.model, &[req.x], std::slice::from_ref(&req.phi), &[req.t], opts)?;
    Ok(s.raw_sum(0, 0, 0) / normalizer(&req.model, req.normalization, req.t)?)
}

/// [`orbit_average`] for the affine models through the domain-restricted
/// path: only linear parts are iterated.
pub fn domain_restricted_affine_sum(req: &OrbitAverageRequest) -> Result<f64> {
    let s = domain_restricted_sums(&req.model, &[req.x], std::slice::from_ref(&req.phi), &[req.t], SumOptions::default())?;
    Ok(s.raw_sum(0, 0, 0) / normalizer(&req.model, req.normalization, req.t)?)
}

/// Orbit sums through the fastest exact path for the model.
pub fn best_sums(
    model: &SpaceModel,
    points: &[Point],
    phis: &[TestFunction],
    ts: &[f64],
    opts: SumOptions,
) -> Result<OrbitSums> {
    match model.kind {
        SpaceKind::AffineSl2z | SpaceKind::AffineSolvable => domain_restricted_sums(model, points, phis, ts, opts),
        _ => orbit_sums(model, points, phis, ts, opts),
    }
}

/// `Σφ(x·γ) / Σψ(x·γ)` over `Γ_t`.
pub fn ratio_average(model: &SpaceModel, x: &Point, phi: &TestFunction, psi: &TestFunction, t: f64) -> Result<f64> {
    if psi.amplitude < 0.0 {
        return Err(Error::config("psi", "must be non-negative"));
    }
    let s = best_sums(model, &[*x], &[phi.clone(), psi.clone()], &[t], SumOptions::default())?;
    ratio_from_sums(&s, 0, 0, 1, 0)
}

/// Ratio of two raw sums of one [`OrbitSums`] table.
pub fn ratio_from_sums(s: &OrbitSums, point: usize, phi: usize, psi: usize, k: usize) -> Result<f64> {
    let den = s.raw_sum(point, psi, k);
    if den == 0.0 {
        return Err(Error::ZeroDenominator { t: s.ts[k] });
    }
    Ok(s.raw_sum(point, phi, k) / den)
}

/// Result of [`continuous_comparison`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousValue {
    pub t: f64,
    pub value: f64,
    /// The same quadrature at `t − 1`.
    pub previous: f64,
    /// The kernel changed by less than 1% between `t − 1` and `t`.
    pub stabilized: bool,
}

/// `∫ φ(y) ρ(H_t[s(x), s(y)])/ρ(H_t) dξ(y)`: skew-ball kernels on the de
/// Sitter models, the closed-form limit kernel elsewhere.
pub fn continuous_comparison(model: &SpaceModel, x: &Point, phi: &TestFunction, t: f64, panels: usize) -> Result<ContinuousValue> {
    let cx = model.chart(x)?;
    let kernel_at = |t: f64| -> Result<f64> {
        let Some((stab, dim)) = (match model.kind {
            SpaceKind::DeSitter2 => Some((StabilizerModel::so11(3)?, 3)),
            SpaceKind::DeSitter3 => Some((StabilizerModel::so12(), 4)),
            _ => None,
        }) else {
            return model.predicted_integral(x, phi, panels);
        };
        let plain = volumes::haar_ball_volume(&stab, t)?.value;
        if plain <= 0.0 {
            return Err(Error::ZeroDenominator { t });
        }
        let gx: RealMatrix = volumes::de_sitter_section(dim, cx[0])?;
        // The kernel depends on y only through its r coordinate.
        let mut cache: HashMap<u64, f64> = HashMap::new();
        let mut err = None;
        let v = model.chart_integral(
            phi,
            |cy| {
                let key = cy[0].to_bits();
                if let Some(&k) = cache.get(&key) {
                    return k;
                }
                let k = volumes::de_sitter_section(dim, cy[0])
                    .and_then(|gy| volumes::skew_ball_volume(&stab, &gx, &gy, t))
                    .map(|s| s.value / plain)
                    .unwrap_or_else(|e| {
                        err.get_or_insert(e);
                        0.0
                    });
                cache.insert(key, k);
                k
            },
            panels,
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    };
    let value = kernel_at(t)?;
    let previous = kernel_at((t - 1.0).max(0.0))?;
    let stabilized = value == previous || ((value - previous) / value).abs() < 0.01;
    Ok(ContinuousValue { t, value, previous, stabilized })
}

/// One row of a report table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub model: String,
    pub lattice: String,
    pub x_id: String,
    pub phi_id: String,
    pub t: f64,
    pub raw_sum: f64,
    pub normalized: f64,
    pub return_count: u64,
    pub ball_count: Option<u128>,
}

pub const REPORT_CSV_HEADER: &str = "model,lattice,x_id,phi_id,t,raw_sum,normalized,return_count,ball_count";

pub fn write_report_csv<W: Write>(mut w: W, rows: &[ReportRow]) -> Result<()> {
    writeln!(w, "{REPORT_CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.model,
            r.lattice,
            r.x_id,
            r.phi_id,
            r.t,
            r.raw_sum,
            r.normalized,
            r.return_count,
            r.ball_count.map(|c| c.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Flattens an [`OrbitSums`] table into report rows.
pub fn report_rows(model: &SpaceModel, sums: &OrbitSums, x_ids: &[String], phi_ids: &[String], mode: NormalizationMode) -> Result<Vec<ReportRow>> {
    let norms: Vec<f64> = sums.ts.iter().map(|&t| normalizer(model, mode, t)).collect::<Result<_>>()?;
    let lattice = lattice_id(&model.spec);
    let mut rows = Vec::new();
    for p in 0..sums.n_points {
        for f in 0..sums.n_phis {
            for (k, &t) in sums.ts.iter().enumerate() {
                let raw = sums.raw_sum(p, f, k);
                rows.push(ReportRow {
                    model: model.id().to_string(),
                    lattice: lattice.clone(),
                    x_id: x_ids.get(p).cloned().unwrap_or_else(|| format!("x{p}")),
                    phi_id: phi_ids.get(f).cloned().unwrap_or_else(|| format!("phi{f}")),
                    t,
                    raw_sum: raw,
                    normalized: raw / norms[k],
                    return_count: sums.return_count(p, f, k),
                    ball_count: sums.ball_counts[k],
                });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub model: String,
    pub lattice: String,
    pub x: Point,
    pub phi_id: String,
    pub normalization: NormalizationMode,
    /// `(t, estimate)`.
    pub grid: Vec<(f64, f64)>,
    pub fitted_limit: f64,
    /// Lower-residual rate model.
    pub rate: RateFit,
    pub alternative: RateFit,
    /// `(t, #{γ ∈ Γ_t : φ(x·γ) ≠ 0})`.
    pub return_counts: Vec<(f64, u64)>,
    pub ball_counts: Vec<(f64, Option<u128>)>,
}

/// Orbit averages on a grid of at least 6 heights with limit and rate fits.
pub fn convergence_report(
    model: &SpaceModel,
    x: &Point,
    phi: &TestFunction,
    t_grid: &[f64],
    mode: NormalizationMode,
    opts: SumOptions,
) -> Result<ConvergenceReport> {
    if t_grid.len() < 6 {
        return Err(Error::config("t_grid", "a convergence report needs at least 6 heights"));
    }
    let sums = best_sums(model, &[*x], std::slice::from_ref(phi), t_grid, opts)?;
    report_from_sums(model, x, &phi.id(), &sums, 0, 0, mode)
}

/// [`convergence_report`] for one `(point, phi)` cell of an existing table.
pub fn report_from_sums(
    model: &SpaceModel,
    x: &Point,
    phi_id: &str,
    sums: &OrbitSums,
    point: usize,
    phi: usize,
    mode: NormalizationMode,
) -> Result<ConvergenceReport> {
    if sums.ts.len() < 6 {
        return Err(Error::config("t_grid", "a convergence report needs at least 6 heights"));
    }
    let mut grid = Vec::with_capacity(sums.ts.len());
    for (k, &t) in sums.ts.iter().enumerate() {
        let v = sums.raw_sum(point, phi, k) / normalizer(model, mode, t)?;
        if !v.is_finite() {
            return Err(Error::Consistency(format!("non-finite estimate at t = {t}")));
        }
        grid.push((t, v));
    }
    let (ts, ys): (Vec<f64>, Vec<f64>) = grid.iter().copied().unzip();
    let (rate, alternative) = select_rate(&ts, &ys)?;
    let fitted_limit = tail_limit(&rate, &ts, &ys)?;
    Ok(ConvergenceReport {
        model: model.id().to_string(),
        lattice: lattice_id(&model.spec),
        x: *x,
        phi_id: phi_id.to_string(),
        normalization: mode,
        grid,
        fitted_limit,
        rate,
        alternative,
        return_counts: sums.ts.iter().enumerate().map(|(k, &t)| (t, sums.return_count(point, phi, k))).collect(),
        ball_counts: sums.ts.iter().copied().zip(sums.ball_counts.iter().copied()).collect(),
    })
}

/// `count` base points drawn uniformly from a chart box, reproducibly from
/// `seed`. Chart coordinates from a continuous distribution avoid the
/// measure-zero exceptional sets of the limit theorems.
pub fn sample_points(model: &SpaceModel, region: &[(f64, f64)], count: usize, seed: u64) -> Result<Vec<Point>> {
    if region.len() != model.kind.chart_dim() {
        return Err(Error::config(
            "points.region",
            format!("{} chart has {} coordinates", model.id(), model.kind.chart_dim()),
        ));
    }
    if region.iter().any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo <= hi)) {
        return Err(Error::config("points.region", "bounds must be finite with lo ≤ hi"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let c: Vec<f64> = region.iter().map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>()).collect();
            model.from_chart(&c)
        })
        .collect()
}
