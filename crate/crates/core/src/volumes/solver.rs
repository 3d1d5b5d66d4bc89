//! Measures of sublevel sets `{s : f(s) ≤ level}` for smooth one-dimensional
//! `f`, by a sign scan on a uniform grid followed by bisection.

/// `f(s) = Σ_j c_j e^{j·κ·s}` for `j = −2..=2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPoly {
    pub c: [f64; 5],
    pub kappa: f64,
}

impl ExpPoly {
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        let e = (self.kappa * s).exp();
        let ei = 1.0 / e;
        let c = &self.c;
        (c[0] * ei + c[1]) * ei + c[2] + (c[3] + c[4] * e) * e
    }
}

/// `∫ w(s) ds` over `{s ∈ [lo, hi] : f(s) ≤ level}`, where `w_anti` is an
/// antiderivative of the weight.
///
/// The set is located by evaluating `f` on `grid + 1` points and bisecting
/// every sign change; components strictly between two grid points are
/// missed, so `grid` must resolve the oscillation of `f`.
pub fn sublevel_measure<F, W>(f: F, lo: f64, hi: f64, level: f64, grid: usize, w_anti: W) -> f64
where
    F: Fn(f64) -> f64,
    W: Fn(f64) -> f64,
{
    if !(hi > lo) {
        return 0.0;
    }
    let g = |s: f64| f(s) - level;
    let h = (hi - lo) / grid as f64;
    let mut total = 0.0;
    let mut s0 = lo;
    let mut g0 = g(s0);
    for i in 1..=grid {
        let s1 = if i == grid { hi } else { lo + i as f64 * h };
        let g1 = g(s1);
        match (g0 <= 0.0, g1 <= 0.0) {
            (true, true) => total += w_anti(s1) - w_anti(s0),
            (true, false) => total += w_anti(bisect(&g, s0, s1)) - w_anti(s0),
            (false, true) => total += w_anti(s1) - w_anti(bisect(&g, s1, s0)),
            (false, false) => {}
        }
        s0 = s1;
        g0 = g1;
    }
    total
}

/// Root of `g` between `inside` (`g ≤ 0`) and `outside` (`g > 0`).
fn bisect<G: Fn(f64) -> f64>(g: &G, mut inside: f64, mut outside: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (inside + outside);
        if mid == inside || mid == outside {
            break;
        }
        if g(mid) <= 0.0 {
            inside = mid;
        } else {
            outside = mid;
        }
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_lengths() {
        // 2cosh 2s ≤ L  ⟺  |s| ≤ ½ arccosh(L/2).
        let p = ExpPoly { c: [1.0, 0.0, 0.0, 0.0, 1.0], kappa: 1.0 };
        assert!((p.eval(0.7) - 2.0 * 1.4f64.cosh()).abs() < 1e-13);
        let level = 50.0;
        let m = sublevel_measure(|s| p.eval(s), -5.0, 5.0, level, 64, |s| s);
        assert!((m - (level / 2.0).acosh()).abs() < 1e-12);
        // Weighted by sinh on [0, ∞).
        let m = sublevel_measure(|s| p.eval(s), 0.0, 5.0, level, 64, f64::cosh);
        assert!((m - ((0.5 * (level / 2.0).acosh()).cosh() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn two_components() {
        // (s² − 1)² ≤ 0.25 has two components of equal length.
        let m = sublevel_measure(|s| (s * s - 1.0).powi(2), -3.0, 3.0, 0.25, 97, |s| s);
        let exact = 2.0 * (1.5f64.sqrt() - 0.5f64.sqrt());
        assert!((m - exact).abs() < 1e-12);
    }
}
