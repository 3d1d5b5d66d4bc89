//! Growth-exponent fits and Hölder regularity of `t ↦ ρ(H_t)`.

use serde::{Deserialize, Serialize};

use super::{haar_ball_volume, StabilizerModel, VolumeSample, MAX_RELATIVE_STDERR};
use crate::stats::{least_squares, linear_slope};
use crate::{Error, Result};

/// `log ρ(H_t) ≈ a·t + b·log t + log c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub a_hat: f64,
    /// The better of `b ∈ {0, 1}` by residual.
    pub b_hat: u32,
    pub logc_hat: f64,
    /// Residual sum of squares of the selected fit.
    pub residual: f64,
    /// Residuals of the `b = 0` and `b = 1` fits.
    pub residuals: [f64; 2],
    /// Unconstrained `b` from the three-parameter fit.
    pub b_continuous: Option<f64>,
    pub t_range: (f64, f64),
    pub samples_used: usize,
}

pub const MIN_FIT_SAMPLES: usize = 8;
pub const MIN_FIT_SPAN: f64 = 3.0;

/// Fit the growth of admitted samples (`stderr/value ≤ 0.01`, positive value).
pub fn fit_growth(samples: &[VolumeSample]) -> Result<GrowthFit> {
    let used: Vec<&VolumeSample> = samples
        .iter()
        .filter(|s| s.value > 0.0 && s.t > 0.0 && s.relative_stderr() <= MAX_RELATIVE_STDERR)
        .collect();
    let ts: Vec<f64> = used.iter().map(|s| s.t).collect();
    let values: Vec<f64> = used.iter().map(|s| s.value).collect();
    fit_growth_series(&ts, &values)
}

/// [`fit_growth`] on bare `(t, ρ)` pairs, for example lattice ball counts.
pub fn fit_growth_series(ts: &[f64], values: &[f64]) -> Result<GrowthFit> {
    let lo = ts.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ts.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if ts.len() != values.len() || ts.len() < MIN_FIT_SAMPLES || hi - lo < MIN_FIT_SPAN {
        return Err(Error::RankDeficient(format!(
            "need {MIN_FIT_SAMPLES} admitted samples spanning {MIN_FIT_SPAN}, got {} over {:.3}",
            ts.len(),
            (hi - lo).max(0.0)
        )));
    }
    if ts.iter().any(|&t| !(t > 0.0)) || values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::domain("growth fits need positive t and positive values"));
    }
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();

    let mut fits = Vec::with_capacity(2);
    for b in 0..2u32 {
        let y: Vec<f64> = ts.iter().zip(&logs).map(|(t, l)| l - b as f64 * t.ln()).collect();
        fits.push(linear_slope(ts, &y)?);
    }
    let residuals = [fits[0].sse, fits[1].sse];
    let b_hat = if residuals[1] < residuals[0] { 1 } else { 0 };
    let best = &fits[b_hat as usize];

    let design: Vec<Vec<f64>> = ts.iter().map(|&t| vec![t, t.ln(), 1.0]).collect();
    let b_continuous = least_squares(&design, &logs).ok().map(|f| f.coefficients[1]);

    Ok(GrowthFit {
        a_hat: best.coefficients[0],
        b_hat,
        logc_hat: best.coefficients[1],
        residual: best.sse,
        residuals,
        b_continuous,
        t_range: (lo, hi),
        samples_used: ts.len(),
    })
}

/// Result of [`holder_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    /// Smallest log-log slope over the `t` grid.
    pub theta_hat: f64,
    /// Smallest `c` with `ρ(H_{t+ε}) − ρ(H_t) ≤ c·ε^θ̂·ρ(H_t)` on the grid.
    pub constant: f64,
    /// `(t, slope)` per grid point.
    pub slopes: Vec<(f64, f64)>,
}

/// Slope of `log((ρ(H_{t+ε}) − ρ(H_t))/ρ(H_t))` against `log ε`, per `t`.
pub fn holder_check(model: &StabilizerModel, t_grid: &[f64], eps_grid: &[f64]) -> Result<HolderEstimate> {
    if t_grid.len() < 5 {
        return Err(Error::config("t_grid", "needs at least 5 points"));
    }
    if eps_grid.len() < 2 || eps_grid.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::config("eps_grid", "needs at least 2 values in (0, 1)"));
    }
    let mut slopes = Vec::with_capacity(t_grid.len());
    let mut rel_all = Vec::new();
    for &t in t_grid {
        let base = haar_ball_volume(model, t)?;
        if base.value <= 0.0 {
            return Err(Error::ZeroDenominator { t });
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for &eps in eps_grid {
            let next = haar_ball_volume(model, t + eps)?;
            let inc = next.value - base.value;
            if inc < -3.0 * next.stderr.hypot(base.stderr) {
                return Err(Error::Consistency(format!(
                    "ρ(H_t) decreases between t = {t} and t = {}",
                    t + eps
                )));
            }
            if inc > 0.0 {
                let rel = inc / base.value;
                xs.push(eps.ln());
                ys.push(rel.ln());
                rel_all.push((eps, rel));
            }
        }
        let fit = linear_slope(&xs, &ys)?;
        slopes.push((t, fit.coefficients[0]));
    }
    let theta_hat = slopes.iter().map(|s| s.1).fold(f64::INFINITY, f64::min);
    let constant = rel_all
        .iter()
        .map(|&(eps, rel)| rel / eps.powf(theta_hat))
        .fold(0.0, f64::max);
    Ok(HolderEstimate { theta_hat, constant, slopes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar_samples(model: &StabilizerModel, ts: impl Iterator<Item = f64>) -> Vec<VolumeSample> {
        ts.map(|t| haar_ball_volume(model, t).unwrap()).collect()
    }

    #[test]
    fn growth_exponents() {
        let grid = || (0..10).map(|k| 5.0 + 0.75 * k as f64);
        for (model, (a, b)) in [
            (StabilizerModel::so11(2).unwrap(), (0.0, 1)),
            (StabilizerModel::so12(), (1.0, 0)),
            (StabilizerModel::sl2r(2).unwrap(), (2.0, 0)),
        ] {
            let fit = fit_growth(&haar_samples(&model, grid())).unwrap();
            assert!((fit.a_hat - a).abs() < 0.1, "{:?}: {fit:?}", model.kind);
            assert_eq!(fit.b_hat, b, "{:?}: {fit:?}", model.kind);
        }
    }

    #[test]
    fn short_range_is_rank_deficient() {
        let m = StabilizerModel::so11(2).unwrap();
        let s = haar_samples(&m, (0..10).map(|k| 5.0 + 0.1 * k as f64));
        assert!(matches!(fit_growth(&s), Err(Error::RankDeficient(_))));
        assert!(matches!(fit_growth(&s[..4]), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn noisy_samples_are_not_admitted() {
        let m = StabilizerModel::so12();
        let mut s = haar_samples(&m, (0..10).map(|k| 4.0 + 0.5 * k as f64));
        s[0].stderr = s[0].value;
        assert_eq!(fit_growth(&s).unwrap().samples_used, 9);
    }

    #[test]
    fn lipschitz_regularity() {
        let ts = [5.0, 6.0, 7.0, 8.0, 9.0];
        let eps = [0.01, 0.03, 0.1, 0.3];
        for m in [StabilizerModel::so11(2).unwrap(), StabilizerModel::so12()] {
            let h = holder_check(&m, &ts, &eps).unwrap();
            assert!(h.theta_hat >= 0.9, "{h:?}");
            assert!(h.constant.is_finite());
        }
        let m = StabilizerModel::so11(2).unwrap();
        assert!(holder_check(&m, &ts[..3], &eps).is_err());
        assert!(holder_check(&m, &ts, &[0.5, 1.5]).is_err());
    }
}
