//! Limits and convergence rates of `A(t)`: fits of `L + c·t^{−β}` and
//! `L + C·e^{−δt}`.

use serde::{Deserialize, Serialize};

use crate::stats::least_squares;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// `L + c·t^{−β}`
    Power,
    /// `L + C·e^{−δt}`
    Exponential,
}

impl RateModel {
    pub fn name(self) -> &'static str {
        match self {
            RateModel::Power => "power",
            RateModel::Exponential => "exponential",
        }
    }

    #[inline]
    fn basis(self, p: f64, t: f64) -> f64 {
        match self {
            RateModel::Power => t.powf(-p),
            RateModel::Exponential => (-p * t).exp(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub model: RateModel,
    /// `β` or `δ`.
    pub parameter: f64,
    pub limit: f64,
    pub coefficient: f64,
    /// Residual sum of squares.
    pub residual: f64,
}

const P_MIN: f64 = 0.02;
const P_MAX: f64 = 5.0;
const SCAN: usize = 240;

/// `(L, c, sse)` of the linear fit for a fixed rate parameter.
fn linear_part(model: RateModel, p: f64, ts: &[f64], ys: &[f64]) -> Option<(f64, f64, f64)> {
    let design: Vec<Vec<f64>> = ts.iter().map(|&t| vec![1.0, model.basis(p, t)]).collect();
    let fit = least_squares(&design, ys).ok()?;
    Some((fit.coefficients[0], fit.coefficients[1], fit.sse))
}

/// Least-squares fit of one rate model; the rate parameter is located by a
/// logarithmic scan over `[0.02, 5]` and refined by golden-section search.
pub fn fit_rate(model: RateModel, ts: &[f64], ys: &[f64]) -> Result<RateFit> {
    if ts.len() != ys.len() || ts.len() < 3 {
        return Err(Error::RankDeficient(format!("{} points for a 3-parameter rate fit", ts.len())));
    }
    if ts.iter().any(|&t| !(t > 0.0)) || ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::domain("rate fits need positive t and finite values"));
    }
    let sse = |p: f64| linear_part(model, p, ts, ys).map_or(f64::INFINITY, |f| f.2);
    let grid: Vec<f64> = (0..SCAN)
        .map(|i| P_MIN * (P_MAX / P_MIN).powf(i as f64 / (SCAN - 1) as f64))
        .collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, sse(p)))
        .fold((0, f64::INFINITY), |acc, (i, e)| if e < acc.1 { (i, e) } else { acc });
    let (mut a, mut b) = (grid[best.saturating_sub(1)].ln(), grid[(best + 1).min(SCAN - 1)].ln());
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if sse(c.exp()) <= sse(d.exp()) {
            b = d;
        } else {
            a = c;
        }
    }
    let p = (0.5 * (a + b)).exp();
    let (limit, coefficient, residual) =
        linear_part(model, p, ts, ys).ok_or_else(|| Error::RankDeficient("rate fit design".into()))?;
    Ok(RateFit { model, parameter: p, limit, coefficient, residual })
}

/// Both rate models, the lower-residual one first.
pub fn select_rate(ts: &[f64], ys: &[f64]) -> Result<(RateFit, RateFit)> {
    let pow = fit_rate(RateModel::Power, ts, ys)?;
    let exp = fit_rate(RateModel::Exponential, ts, ys)?;
    Ok(if pow.residual <= exp.residual { (pow, exp) } else { (exp, pow) })
}

/// Limit from the last third of the grid (at least two points) with the rate
/// parameter held at `fit.parameter`.
pub fn tail_limit(fit: &RateFit, ts: &[f64], ys: &[f64]) -> Result<f64> {
    let n = ts.len();
    let start = n - (n / 3).max(2).min(n);
    linear_part(fit.model, fit.parameter, &ts[start..], &ys[start..])
        .map(|f| f.0)
        .ok_or_else(|| Error::RankDeficient("tail limit fit".into()))
}
