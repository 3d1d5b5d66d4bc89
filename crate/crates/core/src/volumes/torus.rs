//! The one-parameter group `{(aˢ, 0)}` of ℝ ⋉ ℝ², with translation sections.

use super::solver::{sublevel_measure, ExpPoly};
use super::{Method, RealMatrix, StabilizerModel, VolumeSample};
use crate::{Error, Result};

fn log_lambda(model: &StabilizerModel) -> Result<f64> {
    model
        .generator
        .as_ref()
        .map(|g| g.lambda_max.ln())
        .ok_or_else(|| Error::domain("torus model without a generator"))
}

fn sample(model: &StabilizerModel, t: f64, value: f64, method: Method) -> VolumeSample {
    VolumeSample {
        model: model.kind,
        gauge: model.gauge_id(),
        t,
        g1_id: String::new(),
        g2_id: String::new(),
        value,
        stderr: 0.0,
        method,
        seed: None,
    }
}

pub(super) fn haar(model: &StabilizerModel, t: f64) -> Result<VolumeSample> {
    let l = log_lambda(model)?;
    Ok(sample(model, t, 2.0 * t / l, Method::ClosedForm))
}

/// Translation `w` of `[[I, 0], [w, 1]]`; any other matrix is refused.
fn translation(g: &RealMatrix) -> Result<[f64; 2]> {
    let RealMatrix::D3(m) = g else {
        return Err(Error::domain("torus sections are 3×3 affine matrices"));
    };
    let m = &m.0;
    let linear_is_identity = m[0][0] == 1.0 && m[0][1] == 0.0 && m[1][0] == 0.0 && m[1][1] == 1.0;
    if !linear_is_identity || m[0][2] != 0.0 || m[1][2] != 0.0 || m[2][2] != 1.0 {
        return Err(Error::domain("torus sections must be pure translations"));
    }
    Ok([m[2][0], m[2][1]])
}

/// `‖w₂ − w₁aˢ‖²` as an exponential polynomial in `s`.
fn skew_poly(model: &StabilizerModel, w1: [f64; 2], w2: [f64; 2]) -> Result<ExpPoly> {
    let l = log_lambda(model)?;
    let gen = model.generator.as_ref().expect("checked by log_lambda");
    // Spectral projectors of a; w₁aˢ = e^{sL} w₁P_u + e^{−sL} w₁P_s.
    let a = gen.matrix.map(|r| r.map(|v| v as f64));
    let (lmax, lmin) = (gen.lambda_max, gen.lambda_min);
    let gap = lmax - lmin;
    let pu = [
        [(a[0][0] - lmin) / gap, a[0][1] / gap],
        [a[1][0] / gap, (a[1][1] - lmin) / gap],
    ];
    let row = |w: [f64; 2], m: [[f64; 2]; 2]| [w[0] * m[0][0] + w[1] * m[1][0], w[0] * m[0][1] + w[1] * m[1][1]];
    let p = row(w1, pu);
    let q = [w1[0] - p[0], w1[1] - p[1]];
    let dot = |x: [f64; 2], y: [f64; 2]| x[0] * y[0] + x[1] * y[1];
    let f = ExpPoly {
        c: [
            dot(q, q),
            -2.0 * dot(w2, q),
            dot(w2, w2) + 2.0 * dot(p, q),
            -2.0 * dot(w2, p),
            dot(p, p),
        ],
        kappa: l,
    };
    Ok(f)
}

/// `g₁⁻¹·(aˢ, 0)·g₂ = (aˢ, w₂ − w₁aˢ)`; the ball asks `|s| log λ ≤ t` and
/// `‖w₂ − w₁aˢ‖ ≤ eᵗ`.
pub(super) fn skew(
    model: &StabilizerModel,
    g1: &RealMatrix,
    g2: &RealMatrix,
    t: f64,
) -> Result<VolumeSample> {
    let l = log_lambda(model)?;
    let f = skew_poly(model, translation(g1)?, translation(g2)?)?;
    let s_max = t / l;
    let value = sublevel_measure(|s| f.eval(s), -s_max, s_max, (2.0 * t).exp(), model.s_grid, |s| s);
    Ok(sample(model, t, value, Method::Quadrature))
}

#[cfg(test)]
mod tests {
    use super::super::affine_translation;
    use super::*;
    use crate::arith::CyclicGenerator;

    #[test]
    fn exp_poly_matches_integer_powers() {
        let gen = CyclicGenerator::new([[3, 2], [1, 1]]).unwrap();
        let m = StabilizerModel::torus(gen).unwrap();
        let (w1, w2) = ([1.5, -0.5], [0.25, 2.0]);
        let f = skew_poly(&m, w1, w2).unwrap();
        for n in -6i64..=6 {
            let a = gen.power_wide(n).unwrap().map(|v| v as f64);
            let w = [w1[0] * a[0] + w1[1] * a[2], w1[0] * a[1] + w1[1] * a[3]];
            let direct = (w2[0] - w[0]).powi(2) + (w2[1] - w[1]).powi(2);
            assert!((f.eval(n as f64) / direct - 1.0).abs() < 1e-9, "{n}");
        }
        let g1 = affine_translation(w1);
        let g2 = affine_translation(w2);
        let v = skew(&m, &g1, &g2, 3.0).unwrap().value;
        assert!(v > 0.0 && v <= haar(&m, 3.0).unwrap().value);
    }

    #[test]
    fn rejects_linear_sections() {
        let m = StabilizerModel::torus(CyclicGenerator::default()).unwrap();
        let g = RealMatrix::identity(3).unwrap();
        let bad = RealMatrix::D3(crate::matrix::Mat3::from_entries(&[2.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0, 0.0, 1.0]));
        assert!(skew(&m, &bad, &g, 2.0).is_err());
    }
}
