//! Haar and skew-ball volumes of stabilizers, the Θ kernel, growth fits and
//! regularity checks.
//!
//! A skew ball is `H_t[g₁, g₂] = {h ∈ H : log‖g₁⁻¹·h·g₂‖ ≤ t}` with the
//! Frobenius norm of the ambient matrix. The Haar normalization of each
//! model is fixed below; only ratios are compared across models.
//!
//! | model | `H` | coordinates and Haar measure |
//! |---|---|---|
//! | SO11 | boosts `b_s` | `ds` on ℝ |
//! | SO12 | SO(2,1) ⊂ SO(3,1) | `k₁ b_s k₂`, `dk₁ sinh s ds dk₂`, `dk` of mass 1 |
//! | SL2R | SL₂(ℝ) | `k₁ a_u k₂`, `dk₁ sinh 2u du dk₂`, `dk` of mass 1 |
//! | torus | `{(aˢ, 0)}` ⊂ ℝ ⋉ ℝ² | `ds` on ℝ |

mod fit;
mod sl2r;
mod so;
pub mod solver;
mod torus;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use fit::{fit_growth, fit_growth_series, holder_check, GrowthFit, HolderEstimate};

use crate::arith::CyclicGenerator;
use crate::matrix::{Mat2, Mat3, Mat4};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilizerKind {
    So11,
    So12,
    Sl2r,
    Torus,
}

impl StabilizerKind {
    pub fn name(self) -> &'static str {
        match self {
            StabilizerKind::So11 => "so11",
            StabilizerKind::So12 => "so12",
            StabilizerKind::Sl2r => "sl2r",
            StabilizerKind::Torus => "torus",
        }
    }
}

impl fmt::Display for StabilizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StabilizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [StabilizerKind::So11, StabilizerKind::So12, StabilizerKind::Sl2r, StabilizerKind::Torus]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config("stabilizer", format!("unknown stabilizer model {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed-form",
            Method::Quadrature => "quadrature",
            Method::MonteCarlo => "monte-carlo",
        }
    }
}

/// A real square matrix of one of the ambient sizes in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealMatrix {
    D2(Mat2),
    D3(Mat3),
    D4(Mat4),
}

impl RealMatrix {
    pub fn identity(dim: usize) -> Result<Self> {
        match dim {
            2 => Ok(RealMatrix::D2(Mat2::identity())),
            3 => Ok(RealMatrix::D3(Mat3::identity())),
            4 => Ok(RealMatrix::D4(Mat4::identity())),
            _ => Err(Error::domain(format!("no {dim}×{dim} matrices here"))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            RealMatrix::D2(_) => 2,
            RealMatrix::D3(_) => 3,
            RealMatrix::D4(_) => 4,
        }
    }

    pub fn entries(&self) -> &[f64] {
        match self {
            RealMatrix::D2(m) => m.entries(),
            RealMatrix::D3(m) => m.entries(),
            RealMatrix::D4(m) => m.entries(),
        }
    }

    pub fn op_norm(&self) -> f64 {
        match self {
            RealMatrix::D2(m) => m.op_norm(),
            RealMatrix::D3(m) => m.op_norm(),
            RealMatrix::D4(m) => m.op_norm(),
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let singular = || Error::domain("matrix is not invertible");
        Ok(match self {
            RealMatrix::D2(m) => RealMatrix::D2(m.inverse().ok_or_else(singular)?),
            RealMatrix::D3(m) => RealMatrix::D3(m.inverse().ok_or_else(singular)?),
            RealMatrix::D4(m) => RealMatrix::D4(m.inverse().ok_or_else(singular)?),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        Ok(match (self, other) {
            (RealMatrix::D2(a), RealMatrix::D2(b)) => RealMatrix::D2(*a * *b),
            (RealMatrix::D3(a), RealMatrix::D3(b)) => RealMatrix::D3(*a * *b),
            (RealMatrix::D4(a), RealMatrix::D4(b)) => RealMatrix::D4(*a * *b),
            _ => return Err(Error::domain("matrix sizes differ")),
        })
    }

    pub fn is_identity(&self) -> bool {
        let d = self.dim();
        self.entries()
            .iter()
            .enumerate()
            .all(|(k, &v)| v == if k / d == k % d { 1.0 } else { 0.0 })
    }

    fn check_invertible(&self) -> Result<()> {
        if self.entries().iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("matrix entries must be finite"));
        }
        self.inverse().map(|_| ())
    }
}

/// A stabilizer subgroup `H` with its Haar parameterization and the
/// discretization used to integrate over it.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerModel {
    pub kind: StabilizerKind,
    /// Size of the ambient matrices on which the Frobenius gauge is taken.
    pub ambient_dim: usize,
    /// Trapezoid nodes per compact factor (SO12).
    pub k_nodes: usize,
    /// Sign-scan grid for one-dimensional sublevel sets.
    pub s_grid: usize,
    /// Initial Monte Carlo budget (SL2R); doubled up to three times.
    pub mc_samples: u64,
    pub seed: u64,
    pub generator: Option<CyclicGenerator>,
}

/// Monte Carlo samples must reach this relative standard error.
pub const MAX_RELATIVE_STDERR: f64 = 0.01;

impl StabilizerModel {
    fn base(kind: StabilizerKind, ambient_dim: usize) -> Self {
        Self {
            kind,
            ambient_dim,
            k_nodes: 256,
            s_grid: 256,
            mc_samples: 1 << 20,
            seed: 0x5eed,
            generator: None,
        }
    }

    /// One-parameter boosts, as the 2×2 block (`‖b_s‖² = 2cosh 2s`) or
    /// inside SO(2,1) acting on `(x₁, x₂, x₃)` with `x₃` the time coordinate.
    pub fn so11(ambient_dim: usize) -> Result<Self> {
        if !(2..=3).contains(&ambient_dim) {
            return Err(Error::domain("SO11 lives in 2×2 or 3×3 matrices"));
        }
        Ok(Self::base(StabilizerKind::So11, ambient_dim))
    }

    /// SO(2,1) inside SO(3,1), coordinates `(y₀, y₁, y₂, y₃)` with form
    /// `y₀² + y₁² + y₂² − y₃²`, stabilizing `e₀`. `K₀` rotates `(y₁, y₂)` and
    /// `b_s` boosts `(y₂, y₃)`.
    pub fn so12() -> Self {
        Self::base(StabilizerKind::So12, 4)
    }

    /// SL₂(ℝ), as 2×2 matrices or embedded as `diag(h, 1)` in the 3×3 affine
    /// matrices `[[A, 0], [w, 1]]`.
    pub fn sl2r(ambient_dim: usize) -> Result<Self> {
        if !(2..=3).contains(&ambient_dim) {
            return Err(Error::domain("SL2R lives in 2×2 or 3×3 matrices"));
        }
        Ok(Self::base(StabilizerKind::Sl2r, ambient_dim))
    }

    /// `{(aˢ, 0)}` in ℝ ⋉ ℝ² for a generator with positive eigenvalues. The
    /// gauge is `max(‖v‖, e^{|s| log λ_max})`, so its balls match the lattice
    /// balls of ⟨a⟩ ⋉ ℤ². Sections are 3×3 affine translations.
    pub fn torus(generator: CyclicGenerator) -> Result<Self> {
        let [[a, _], [_, d]] = generator.matrix;
        if a + d <= 2 {
            return Err(Error::domain("torus model needs a generator with positive eigenvalues"));
        }
        Ok(Self {
            generator: Some(generator),
            ..Self::base(StabilizerKind::Torus, 3)
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_k_nodes(mut self, n: usize) -> Self {
        self.k_nodes = n;
        self
    }

    pub fn with_mc_samples(mut self, n: u64) -> Self {
        self.mc_samples = n;
        self
    }

    pub fn gauge_id(&self) -> String {
        match self.kind {
            StabilizerKind::Torus => "translation-max".to_string(),
            _ => format!("frobenius-{}", self.ambient_dim),
        }
    }

    /// `(a, b)` of the growth `ρ(H_t) ≍ e^{at} tᵇ`.
    pub fn expected_growth(&self) -> (f64, u32) {
        match self.kind {
            StabilizerKind::So11 | StabilizerKind::Torus => (0.0, 1),
            StabilizerKind::So12 => (1.0, 0),
            StabilizerKind::Sl2r => (2.0, 0),
        }
    }

    fn check_pair(&self, g1: &RealMatrix, g2: &RealMatrix) -> Result<()> {
        for g in [g1, g2] {
            if g.dim() != self.ambient_dim {
                return Err(Error::domain(format!(
                    "{} expects {}×{} matrices, got {}×{}",
                    self.kind,
                    self.ambient_dim,
                    self.ambient_dim,
                    g.dim(),
                    g.dim()
                )));
            }
            g.check_invertible()?;
        }
        Ok(())
    }
}

/// One volume measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VolumeSample {
    pub model: StabilizerKind,
    pub gauge: String,
    pub t: f64,
    pub g1_id: String,
    pub g2_id: String,
    pub value: f64,
    pub stderr: f64,
    pub method: Method,
    pub seed: Option<u64>,
}

impl VolumeSample {
    pub fn relative_stderr(&self) -> f64 {
        if self.value > 0.0 {
            self.stderr / self.value
        } else if self.stderr == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn with_ids(mut self, g1: &str, g2: &str) -> Self {
        self.g1_id = g1.to_string();
        self.g2_id = g2.to_string();
        self
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::config("t", format!("must be finite and non-negative, got {t}")));
    }
    Ok(())
}

/// `ρ(H_t)`.
pub fn haar_ball_volume(model: &StabilizerModel, t: f64) -> Result<VolumeSample> {
    check_t(t)?;
    let mut s = match model.kind {
        StabilizerKind::So11 => so::so11_haar(model, t),
        StabilizerKind::So12 => so::so12_haar(model, t),
        StabilizerKind::Sl2r => sl2r::haar(model, t),
        StabilizerKind::Torus => torus::haar(model, t),
    }?;
    s.g1_id = "I".into();
    s.g2_id = "I".into();
    Ok(s)
}

/// `ρ(H_t[g₁, g₂])`.
pub fn skew_ball_volume(
    model: &StabilizerModel,
    g1: &RealMatrix,
    g2: &RealMatrix,
    t: f64,
) -> Result<VolumeSample> {
    check_t(t)?;
    model.check_pair(g1, g2)?;
    if g1.is_identity() && g2.is_identity() {
        return haar_ball_volume(model, t);
    }
    let mut s = match model.kind {
        StabilizerKind::So11 => so::so11_skew(model, g1, g2, t),
        StabilizerKind::So12 => so::so12_skew(model, g1, g2, t),
        StabilizerKind::Sl2r => sl2r::skew(model, g1, g2, t),
        StabilizerKind::Torus => torus::skew(model, g1, g2, t),
    }?;
    s.g1_id = if g1.is_identity() { "I".into() } else { "g1".into() };
    s.g2_id = if g2.is_identity() { "I".into() } else { "g2".into() };
    Ok(s)
}

/// Result of [`theta_estimate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Ratio at `t_max − 1`.
    pub previous: f64,
    pub relative_change: f64,
    /// Successive ratios differ by less than 1%.
    pub stabilized: bool,
    pub t_max: f64,
}

/// `Θ(g₁, g₂) ≈ ρ(H_t[g₁, g₂]) / ρ(H_t)` at `t = t_max`, with the
/// stabilization check against `t_max − 1`.
pub fn theta_estimate(
    model: &StabilizerModel,
    g1: &RealMatrix,
    g2: &RealMatrix,
    t_max: f64,
) -> Result<ThetaEstimate> {
    let ratio = |t: f64| -> Result<(f64, f64)> {
        let skew = skew_ball_volume(model, g1, g2, t)?;
        let plain = haar_ball_volume(model, t)?;
        if plain.value <= 0.0 {
            return Err(Error::ZeroDenominator { t });
        }
        let r = skew.value / plain.value;
        let rel = skew.relative_stderr().hypot(plain.relative_stderr());
        Ok((r, r * rel))
    };
    let (value, stderr) = ratio(t_max)?;
    let (previous, _) = ratio(t_max - 1.0)?;
    let relative_change = ((value - previous) / value).abs();
    Ok(ThetaEstimate {
        value,
        stderr,
        previous,
        relative_change,
        stabilized: relative_change < 0.01,
        t_max,
    })
}

/// Constant `c` of the coarse-admissibility sandwich
/// `H_{t−c}[g₁, g₂] ⊆ H_t[g₁b₁, g₂b₂] ⊆ H_{t+c}[g₁, g₂]`:
/// the larger of `log‖b₁⁻¹‖ + log‖b₂‖` and `log‖b₁‖ + log‖b₂⁻¹‖`
/// (operator norms).
pub fn sandwich_constant(b1: &RealMatrix, b2: &RealMatrix) -> Result<f64> {
    let inner = b1.inverse()?.op_norm().ln() + b2.op_norm().ln();
    let outer = b1.op_norm().ln() + b2.inverse()?.op_norm().ln();
    // Power iteration is accurate to ~1e-15 relative; keep the inclusion safe.
    Ok(inner.max(outer) + 1e-12)
}

/// The three volumes of the sandwich at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    pub t: f64,
    pub c: f64,
    pub lower: VolumeSample,
    pub middle: VolumeSample,
    pub upper: VolumeSample,
    /// `lower ≤ middle ≤ upper` within three combined standard errors.
    pub holds: bool,
}

pub fn sandwich_check(
    model: &StabilizerModel,
    g1: &RealMatrix,
    g2: &RealMatrix,
    b1: &RealMatrix,
    b2: &RealMatrix,
    t: f64,
) -> Result<SandwichCheck> {
    let c = sandwich_constant(b1, b2)?;
    let p1 = g1.mul(b1)?;
    let p2 = g2.mul(b2)?;
    let (lower, middle, upper) = if model.kind == StabilizerKind::Sl2r {
        // Common random numbers: one proposal for all three predicates.
        let mut v = sl2r::skew_many(model, &[(g1, g2, t - c), (&p1, &p2, t), (g1, g2, t + c)])?;
        let upper = v.pop().expect("three");
        let middle = v.pop().expect("three");
        let lower = v.pop().expect("three");
        (lower, middle, upper)
    } else {
        (
            skew_ball_volume(model, g1, g2, (t - c).max(0.0))?,
            skew_ball_volume(model, &p1, &p2, t)?,
            skew_ball_volume(model, g1, g2, t + c)?,
        )
    };
    let tol = |a: &VolumeSample, b: &VolumeSample| 3.0 * a.stderr.hypot(b.stderr);
    let holds = lower.value <= middle.value + tol(&lower, &middle)
        && middle.value <= upper.value + tol(&middle, &upper);
    Ok(SandwichCheck { t, c, lower, middle, upper, holds })
}

pub const VOLUME_CSV_HEADER: &str = "model,gauge,t,g1_id,g2_id,value,stderr,method,seed";

pub fn write_volume_csv<W: Write>(mut w: W, samples: &[VolumeSample]) -> Result<()> {
    writeln!(w, "{VOLUME_CSV_HEADER}")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            s.model,
            s.gauge,
            s.t,
            s.g1_id,
            s.g2_id,
            s.value,
            s.stderr,
            s.method.name(),
            s.seed.map(|v| v.to_string()).unwrap_or_default()
        )?;
    }
    Ok(())
}

/// Sections `s(x)` of the de Sitter models: the boost carrying the base point
/// to time coordinate `sinh r`, in the layout of [`StabilizerModel::so11`]
/// (3×3) or [`StabilizerModel::so12`].
pub fn de_sitter_section(ambient_dim: usize, r: f64) -> Result<RealMatrix> {
    use crate::matrix::boost;
    match ambient_dim {
        3 => Ok(RealMatrix::D3(boost::<3>(0, 2, r))),
        4 => Ok(RealMatrix::D4(boost::<4>(0, 3, r))),
        _ => Err(Error::domain("de Sitter sections are 3×3 or 4×4")),
    }
}

/// Affine translation `[[I, 0], [w, 1]]` (row-vector convention).
pub fn affine_translation(w: [f64; 2]) -> RealMatrix {
    let mut m = Mat3::identity();
    m.0[2][0] = w[0];
    m.0[2][1] = w[1];
    RealMatrix::D3(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{boost, rotation};

    #[test]
    fn so11_closed_form_example() {
        let m = StabilizerModel::so11(2).unwrap();
        let v = haar_ball_volume(&m, 5.0).unwrap();
        assert_eq!(v.method, Method::ClosedForm);
        assert!((v.value - (10f64.exp() / 2.0).acosh()).abs() < 1e-12);
        assert!((v.value - 10.0).abs() < 1e-3);
    }

    #[test]
    fn identity_pair_is_haar() {
        for m in [StabilizerModel::so11(3).unwrap(), StabilizerModel::so12(), StabilizerModel::sl2r(2).unwrap()] {
            let id = RealMatrix::identity(m.ambient_dim).unwrap();
            let a = skew_ball_volume(&m, &id, &id, 3.0).unwrap();
            let b = haar_ball_volume(&m, 3.0).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn so11_skew_quadratic_matches_scan() {
        // Closed-form quadratic against the generic sign scan.
        let m = StabilizerModel::so11(2).unwrap();
        let g1 = RealMatrix::D2(Mat2::from_entries(&[1.2, 0.3, -0.4, 0.9]));
        let g2 = RealMatrix::D2(Mat2::from_entries(&[0.8, -0.1, 0.2, 1.1]));
        let v = skew_ball_volume(&m, &g1, &g2, 4.0).unwrap().value;
        let (Ok(RealMatrix::D2(g1i)), RealMatrix::D2(g2m)) = (g1.inverse(), g2) else { unreachable!() };
        let f = |s: f64| (g1i * boost::<2>(0, 1, s) * g2m).frobenius_sq();
        let scan = solver::sublevel_measure(f, -20.0, 20.0, 8f64.exp(), 4000, |s| s);
        assert!((v - scan).abs() < 1e-9, "{v} vs {scan}");
    }

    #[test]
    fn so12_theta_at_sections() {
        let m = StabilizerModel::so12();
        for (r1, r2, expected) in [(1.0, 0.0, 1.0 / 1f64.cosh()), (1.0, 1.0, 1.0 / 1f64.cosh().powi(2))] {
            let g1 = de_sitter_section(4, r1).unwrap();
            let g2 = de_sitter_section(4, r2).unwrap();
            let th = theta_estimate(&m, &g1, &g2, 12.0).unwrap();
            assert!(th.stabilized);
            assert!((th.value / expected - 1.0).abs() < 0.02, "{} vs {expected}", th.value);
        }
    }

    #[test]
    fn so12_k_invariance() {
        // Right multiplication by the maximal compact subgroup leaves Θ fixed;
        // this exercises the full K₀ × K₀ quadrature.
        let m = StabilizerModel::so12().with_k_nodes(64);
        let g1 = de_sitter_section(4, 0.5).unwrap();
        let RealMatrix::D4(base) = de_sitter_section(4, 0.7).unwrap() else { unreachable!() };
        let plain = skew_ball_volume(&m, &g1, &RealMatrix::D4(base), 8.0).unwrap().value;
        let turned = RealMatrix::D4(base * rotation::<4>(0, 1, 0.9) * rotation::<4>(1, 2, 0.4));
        let v = skew_ball_volume(&m, &g1, &turned, 8.0).unwrap().value;
        assert!((v / plain - 1.0).abs() < 0.02, "{v} vs {plain}");
    }

    #[test]
    fn sl2r_affine_theta() {
        let m = StabilizerModel::sl2r(3).unwrap().with_mc_samples(1 << 18);
        let id = RealMatrix::identity(3).unwrap();
        let w = affine_translation([1.0, 1.0]);
        let th = theta_estimate(&m, &w, &id, 6.0).unwrap();
        let expected = 3f64.powf(-0.5);
        assert!((th.value - expected).abs() < 4.0 * th.stderr + 0.01, "{th:?}");
    }

    #[test]
    fn mc_is_reproducible() {
        let m = StabilizerModel::sl2r(2).unwrap().with_mc_samples(1 << 16).with_seed(9);
        let g = RealMatrix::D2(Mat2::from_entries(&[2.0, 1.0, 1.0, 1.0]));
        let id = RealMatrix::identity(2).unwrap();
        let a = skew_ball_volume(&m, &g, &id, 3.0).unwrap();
        let b = skew_ball_volume(&m, &g, &id, 3.0).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.seed, Some(9));
    }

    #[test]
    fn torus_haar_and_theta() {
        let m = StabilizerModel::torus(CyclicGenerator::default()).unwrap();
        let l = CyclicGenerator::default().lambda_max.ln();
        let v = haar_ball_volume(&m, 10.0).unwrap();
        assert!((v.value - 20.0 / l).abs() < 1e-12);
        let g1 = affine_translation([0.3, 0.2]);
        let g2 = affine_translation([-0.5, 0.1]);
        let th = theta_estimate(&m, &g1, &g2, 40.0).unwrap();
        assert!((th.value - 1.0).abs() < 0.02, "{th:?}");
    }

    #[test]
    fn skew_volumes_are_monotone() {
        let m = StabilizerModel::so12().with_k_nodes(32);
        let g1 = RealMatrix::D4(boost::<4>(0, 3, 0.4) * rotation::<4>(0, 1, 0.3));
        let g2 = de_sitter_section(4, 0.2).unwrap();
        let mut prev = 0.0;
        for k in 0..8 {
            let v = skew_ball_volume(&m, &g1, &g2, 2.0 + 0.5 * k as f64).unwrap().value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn sandwich_holds() {
        let b1 = RealMatrix::D4(boost::<4>(1, 3, 0.2) * rotation::<4>(0, 2, 0.5));
        let b2 = RealMatrix::D4(boost::<4>(0, 3, -0.3));
        let g1 = de_sitter_section(4, 0.5).unwrap();
        let g2 = de_sitter_section(4, 0.0).unwrap();
        let m = StabilizerModel::so12().with_k_nodes(32);
        let chk = sandwich_check(&m, &g1, &g2, &b1, &b2, 6.0).unwrap();
        assert!(chk.holds && chk.c > 0.0, "{chk:?}");

        let m = StabilizerModel::sl2r(2).unwrap().with_mc_samples(1 << 16);
        let b1 = RealMatrix::D2(Mat2::from_entries(&[1.1, 0.2, 0.0, 1.0 / 1.1]));
        let id = RealMatrix::identity(2).unwrap();
        let chk = sandwich_check(&m, &id, &id, &b1, &id, 4.0).unwrap();
        assert!(chk.lower.value <= chk.middle.value && chk.middle.value <= chk.upper.value, "{chk:?}");
    }

    #[test]
    fn csv_schema() {
        let m = StabilizerModel::so11(2).unwrap();
        let s = haar_ball_volume(&m, 2.0).unwrap();
        let mut buf = Vec::new();
        write_volume_csv(&mut buf, &[s]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), VOLUME_CSV_HEADER);
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row.len(), 9);
        assert_eq!(row[0], "so11");
        assert_eq!(row[7], "closed-form");
    }
}
