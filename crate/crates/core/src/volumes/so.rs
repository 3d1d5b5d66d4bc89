//! Boost groups: SO(1,1) in 2×2 or 3×3 matrices, and SO(2,1) ⊂ SO(3,1) in
//! Cartan coordinates `k₁ b_s k₂`.

use std::f64::consts::TAU;

use rayon::prelude::*;

use super::solver::{sublevel_measure, ExpPoly};
use super::{Method, RealMatrix, StabilizerModel, VolumeSample};
use crate::matrix::{rotation, Mat, Mat4};
use crate::stats::CompensatedSum;
use crate::{Error, Result};

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

/// Split `b_s = P₀ + eˢ N₊ + e⁻ˢ N₋` for the boost in the `(i, j)` plane.
fn boost_parts<const N: usize>(i: usize, j: usize) -> [Mat<N>; 3] {
    let mut p0 = Mat::<N>::identity();
    p0.0[i][i] = 0.0;
    p0.0[j][j] = 0.0;
    let mut np = Mat::<N>([[0.0; N]; N]);
    let mut nm = np;
    for (a, b) in [(i, i), (j, j)] {
        np.0[a][b] = 0.5;
        nm.0[a][b] = 0.5;
    }
    np.0[i][j] = 0.5;
    np.0[j][i] = 0.5;
    nm.0[i][j] = -0.5;
    nm.0[j][i] = -0.5;
    [p0, np, nm]
}

/// `‖L·b_s·R‖²` as an exponential polynomial in `s`.
fn frobenius_poly<const N: usize>(parts: &[Mat<N>; 3], l: &Mat<N>, r: &Mat<N>) -> ExpPoly {
    let [m0, mp, mm] = parts.map(|p| *l * p * *r);
    ExpPoly {
        c: [
            mm.frobenius_sq(),
            2.0 * m0.dot(&mm),
            m0.frobenius_sq() + 2.0 * mp.dot(&mm),
            2.0 * m0.dot(&mp),
            mp.frobenius_sq(),
        ],
        kappa: 1.0,
    }
}

/// `|s|` can be no larger than this on `H_t[g₁, g₂]`: from
/// `b_s = g₁·M·g₂⁻¹` and `‖b_s‖ ≥ e^{|s|}`.
fn s_bound(g1: &RealMatrix, g2: &RealMatrix, t: f64) -> Result<f64> {
    Ok(t + g1.op_norm().ln() + g2.inverse()?.op_norm().ln() + 1.0)
}

pub(super) fn so11_haar(model: &StabilizerModel, t: f64) -> Result<VolumeSample> {
    // ‖b_s‖² = 2cosh 2s (+1 in the 3×3 layout).
    let extra = (model.ambient_dim - 2) as f64;
    let x = ((2.0 * t).exp() - extra) / 2.0;
    let value = if x >= 1.0 { x.acosh() } else { 0.0 };
    Ok(sample(model, t, value, Method::ClosedForm))
}

pub(super) fn so11_skew(
    model: &StabilizerModel,
    g1: &RealMatrix,
    g2: &RealMatrix,
    t: f64,
) -> Result<VolumeSample> {
    let level = (2.0 * t).exp();
    match (g1.inverse()?, g2) {
        (RealMatrix::D2(l), RealMatrix::D2(r)) => {
            // ‖M‖² = A u + B + C/u with u = e^{2s}: a quadratic after
            // multiplying through by u.
            let p = frobenius_poly(&boost_parts::<2>(0, 1), &l, r);
            let (a, b, c) = (p.c[4], p.c[2] - level, p.c[0]);
            let disc = b * b - 4.0 * a * c;
            let value = if disc <= 0.0 || b >= 0.0 {
                0.0
            } else {
                // Both roots positive; the smaller one from the stable form.
                let q = -0.5 * (b - disc.sqrt());
                let (u1, u2) = (c / q, q / a);
                0.5 * (u2 / u1).ln()
            };
            Ok(sample(model, t, value, Method::ClosedForm))
        }
        (RealMatrix::D3(l), RealMatrix::D3(r)) => {
            let p = frobenius_poly(&boost_parts::<3>(1, 2), &l, r);
            let sb = s_bound(g1, g2, t)?;
            let value = sublevel_measure(|s| p.eval(s), -sb, sb, level, model.s_grid, |s| s);
            Ok(sample(model, t, value, Method::Quadrature))
        }
        _ => Err(Error::domain("SO11 expects 2×2 or 3×3 matrices")),
    }
}

/// `S` with `‖b_S‖² = 2 + 2cosh 2S = e^{2t}`.
fn so12_s_max(t: f64) -> Option<f64> {
    let x = ((2.0 * t).exp() - 2.0) / 2.0;
    (x >= 1.0).then(|| 0.5 * x.acosh())
}

pub(super) fn so12_haar(model: &StabilizerModel, t: f64) -> Result<VolumeSample> {
    let value = so12_s_max(t).map_or(0.0, |s| s.cosh() - 1.0);
    Ok(sample(model, t, value, Method::ClosedForm))
}

/// Does `g` commute with the rotations `K₀` of the `(y₁, y₂)` plane?
fn commutes_with_k0(g: &Mat4) -> bool {
    let mut j = Mat([[0.0; 4]; 4]);
    j.0[1][2] = -1.0;
    j.0[2][1] = 1.0;
    let scale = g.frobenius().max(1.0);
    (*g * j).max_abs_diff(&(j * *g)) <= 1e-14 * scale
}

/// Nodes of the periodic trapezoid rule on `K₀`, or the single node `0` when
/// the integrand does not depend on the angle.
fn k_nodes(n: usize, trivial: bool) -> Vec<Mat4> {
    if trivial {
        return vec![Mat4::identity()];
    }
    (0..n).map(|k| rotation::<4>(1, 2, TAU * k as f64 / n as f64)).collect()
}

pub(super) fn so12_skew(
    model: &StabilizerModel,
    g1: &RealMatrix,
    g2: &RealMatrix,
    t: f64,
) -> Result<VolumeSample> {
    let (RealMatrix::D4(l), RealMatrix::D4(r)) = (g1.inverse()?, g2) else {
        return Err(Error::domain("SO12 expects 4×4 matrices"));
    };
    if model.k_nodes == 0 {
        return Err(Error::config("k_nodes", "must be positive"));
    }
    let level = (2.0 * t).exp();
    let sb = s_bound(g1, g2, t)?;
    let parts = boost_parts::<4>(2, 3);
    let left: Vec<Mat4> = k_nodes(model.k_nodes, commutes_with_k0(&l))
        .into_iter()
        .map(|k| l * k)
        .collect();
    let right: Vec<Mat4> = k_nodes(model.k_nodes, commutes_with_k0(r))
        .into_iter()
        .map(|k| k * *r)
        .collect();
    let grid = model.s_grid;
    let rows: Vec<f64> = left
        .par_iter()
        .map(|lk| {
            let mut acc = CompensatedSum::default();
            for kr in &right {
                let p = frobenius_poly(&parts, lk, kr);
                acc.add(sublevel_measure(|s| p.eval(s), 0.0, sb, level, grid, f64::cosh));
            }
            acc.value()
        })
        .collect();
    let mut total = CompensatedSum::default();
    for v in rows {
        total.add(v);
    }
    let value = total.value() / (left.len() * right.len()) as f64;
    Ok(sample(model, t, value, Method::Quadrature))
}
