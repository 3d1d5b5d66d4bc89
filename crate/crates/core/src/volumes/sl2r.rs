//! SL₂(ℝ) balls. Plain balls in closed form; skew balls by Monte Carlo in
//! Cartan coordinates `h = k(θ₁)·diag(eᵘ, e⁻ᵘ)·k(θ₂)`, with `u` drawn from the
//! Cartan density `sinh 2u` on `[0, U]`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Method, RealMatrix, StabilizerModel, VolumeSample, MAX_RELATIVE_STDERR};
use crate::matrix::{Mat2, Mat3};
use crate::{Error, Result};

const BATCH: u64 = 1 << 16;
const MAX_DOUBLINGS: u32 = 3;

/// `cosh 2U` with `‖h‖² = 2cosh 2u (+1 in 3×3) = R²` on the boundary.
fn cosh_2u(ambient_dim: usize, log_r: f64) -> f64 {
    let extra = (ambient_dim - 2) as f64;
    (((2.0 * log_r).exp() - extra) / 2.0).max(1.0)
}

pub(super) fn haar(model: &StabilizerModel, t: f64) -> Result<VolumeSample> {
    let value = (cosh_2u(model.ambient_dim, t) - 1.0) / 2.0;
    Ok(VolumeSample {
        model: model.kind,
        gauge: model.gauge_id(),
        t,
        g1_id: "I".into(),
        g2_id: "I".into(),
        value,
        stderr: 0.0,
        method: Method::ClosedForm,
        seed: None,
    })
}

pub(super) fn skew(
    model: &StabilizerModel,
    g1: &RealMatrix,
    g2: &RealMatrix,
    t: f64,
) -> Result<VolumeSample> {
    Ok(skew_many(model, &[(g1, g2, t)])?.remove(0))
}

enum Pair {
    D2(Mat2, Mat2),
    D3(Mat3, Mat3),
}

impl Pair {
    fn new(g1: &RealMatrix, g2: &RealMatrix) -> Result<Self> {
        match (g1.inverse()?, g2) {
            (RealMatrix::D2(l), RealMatrix::D2(r)) => Ok(Pair::D2(l, *r)),
            (RealMatrix::D3(l), RealMatrix::D3(r)) => Ok(Pair::D3(l, *r)),
            _ => Err(Error::domain("SL2R expects 2×2 or 3×3 matrices")),
        }
    }

    fn norm_sq(&self, h: &Mat2) -> f64 {
        match self {
            Pair::D2(l, r) => (*l * *h * *r).frobenius_sq(),
            Pair::D3(l, r) => {
                let mut e = Mat3::identity();
                for i in 0..2 {
                    for j in 0..2 {
                        e.0[i][j] = h.0[i][j];
                    }
                }
                (*l * e * *r).frobenius_sq()
            }
        }
    }
}

fn rot(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::from_entries(&[c, -s, s, c])
}

/// Hit counts of one batch for every predicate.
fn batch_hits(seed: u64, batch: u64, cosh_bound: f64, pairs: &[(Pair, f64)]) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    let mut hits = vec![0u64; pairs.len()];
    for _ in 0..BATCH {
        let th1 = TAU * rng.random::<f64>();
        let th2 = TAU * rng.random::<f64>();
        let xi: f64 = rng.random();
        let u = 0.5 * (1.0 + xi * (cosh_bound - 1.0)).acosh();
        let d = Mat2::from_entries(&[u.exp(), 0.0, 0.0, (-u).exp()]);
        let h = rot(th1) * d * rot(th2);
        for ((pair, level), hit) in pairs.iter().zip(hits.iter_mut()) {
            if pair.norm_sq(&h) <= *level {
                *hit += 1;
            }
        }
    }
    hits
}

/// Skew volumes of several `(g₁, g₂, t)` from one shared sample stream, so
/// the estimates are positively correlated (common random numbers).
pub(super) fn skew_many(
    model: &StabilizerModel,
    queries: &[(&RealMatrix, &RealMatrix, f64)],
) -> Result<Vec<VolumeSample>> {
    if model.mc_samples == 0 {
        return Err(Error::config("mc_samples", "must be positive"));
    }
    let mut log_r = f64::NEG_INFINITY;
    let mut pairs = Vec::with_capacity(queries.len());
    for &(g1, g2, t) in queries {
        model.check_pair(g1, g2)?;
        log_r = log_r.max(t + g1.op_norm().ln() + g2.inverse()?.op_norm().ln());
        pairs.push((Pair::new(g1, g2)?, (2.0 * t).exp()));
    }
    // Slack for rounding in the operator norms.
    let cosh_bound = cosh_2u(model.ambient_dim, log_r + 1e-9);
    let z = (cosh_bound - 1.0) / 2.0;

    let base_batches = model.mc_samples.div_ceil(BATCH);
    let mut hits = vec![0u64; pairs.len()];
    let mut done = 0u64;
    let mut target = base_batches;
    for round in 0..=MAX_DOUBLINGS {
        let fresh: Vec<Vec<u64>> = (done..target)
            .into_par_iter()
            .map(|b| batch_hits(model.seed, b, cosh_bound, &pairs))
            .collect();
        for h in fresh {
            for (acc, v) in hits.iter_mut().zip(h) {
                *acc += v;
            }
        }
        done = target;
        let n = (done * BATCH) as f64;
        let samples: Vec<VolumeSample> = queries
            .iter()
            .zip(&hits)
            .map(|(&(_, _, t), &k)| {
                let p = k as f64 / n;
                VolumeSample {
                    model: model.kind,
                    gauge: model.gauge_id(),
                    t,
                    g1_id: String::new(),
                    g2_id: String::new(),
                    value: z * p,
                    stderr: z * (p * (1.0 - p) / n).sqrt(),
                    method: Method::MonteCarlo,
                    seed: Some(model.seed),
                }
            })
            .collect();
        // An empty ball is exact only when the bounding region is empty too.
        let converged = samples
            .iter()
            .all(|s| s.relative_stderr() <= MAX_RELATIVE_STDERR || z == 0.0);
        if converged {
            return Ok(samples);
        }
        if round == MAX_DOUBLINGS {
            let worst = samples.iter().map(|s| s.relative_stderr()).fold(0.0, f64::max);
            return Err(Error::NotConverged(format!(
                "relative stderr {worst:.4} after {} samples",
                done * BATCH
            )));
        }
        target *= 2;
    }
    unreachable!("loop returns on its last round")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_growth_slope() {
        let m = StabilizerModel::sl2r(2).unwrap();
        let ts: Vec<f64> = (0..7).map(|k| 3.0 + 0.5 * k as f64).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| haar(&m, t).unwrap().value.ln()).collect();
        let fit = crate::stats::linear_slope(&ts, &ys).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 0.05);
    }

    #[test]
    fn monte_carlo_recovers_haar_ball() {
        // The identity pair at t = 4 sampled under the t = 5 bound: an
        // unbiased estimate of the closed form.
        let m = StabilizerModel::sl2r(2).unwrap().with_mc_samples(1 << 17);
        let id = RealMatrix::identity(2).unwrap();
        let mc = skew_many(&m, &[(&id, &id, 4.0), (&id, &id, 5.0)]).unwrap().remove(0);
        assert!(mc.stderr > 0.0);
        let exact = haar(&m, 4.0).unwrap().value;
        assert!((mc.value - exact).abs() < 4.0 * mc.stderr + 1e-9 * exact, "{mc:?} vs {exact}");
    }

    #[test]
    fn doubling_gives_up() {
        // A far-off pair leaves almost no hits.
        let m = StabilizerModel::sl2r(2).unwrap().with_mc_samples(1 << 16);
        let id = RealMatrix::identity(2).unwrap();
        let g = RealMatrix::D2(Mat2::from_entries(&[400.0, 0.0, 0.0, 1.0 / 400.0]));
        assert!(matches!(skew(&m, &g, &id, 1.2), Err(Error::NotConverged(_))));
    }
}
