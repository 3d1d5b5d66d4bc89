//! Height functions `t = log P(m)` on matrix spaces and the ball predicates
//! shared by every other module.
//!
//! Heights use the natural logarithm. Floating-point heights are compared
//! with an absolute tolerance of [`HEIGHT_TOL`]; exact integer matrices are
//! tested by comparing their integer squared Frobenius norm against the
//! integer threshold of a [`BallBound`].

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance applied when a floating-point height is compared with `t`.
pub const HEIGHT_TOL: f64 = 1e-12;

/// A ball parameter / height value `t = log P`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Height(pub f64);

impl Height {
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for Height {
    fn from(t: f64) -> Self {
        Height(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeKind {
    /// Euclidean norm of the entries.
    Frobenius,
    /// `P(m) = Σ m_ij^(2k)`, homogeneous of degree `2k`.
    EntryPower { half_degree: u32 },
    /// Frobenius norm of the affine embedding `[[h, 0], [v, 1]]`.
    AffineBlock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaugeFunction {
    pub kind: GaugeKind,
    /// Matrices are `ambient_dim × ambient_dim`.
    pub ambient_dim: usize,
}

impl GaugeFunction {
    pub fn frobenius(dim: usize) -> Self {
        Self {
            kind: GaugeKind::Frobenius,
            ambient_dim: dim,
        }
    }

    pub fn entry_power(dim: usize, degree: u32) -> Result<Self> {
        if degree == 0 || degree % 2 != 0 {
            return Err(Error::domain(format!(
                "entry-power gauge needs a positive even degree, got {degree}"
            )));
        }
        Ok(Self {
            kind: GaugeKind::EntryPower {
                half_degree: degree / 2,
            },
            ambient_dim: dim,
        })
    }

    /// Gauge for affine maps of `ℝ^linear_dim`, evaluated on the
    /// `(linear_dim + 1)`-square embedding.
    pub fn affine_block(linear_dim: usize) -> Self {
        Self {
            kind: GaugeKind::AffineBlock,
            ambient_dim: linear_dim + 1,
        }
    }

    /// Homogeneity degree of `P`.
    pub fn degree(&self) -> u32 {
        match self.kind {
            GaugeKind::Frobenius | GaugeKind::AffineBlock => 1,
            GaugeKind::EntryPower { half_degree } => 2 * half_degree,
        }
    }

    /// `P(m)` for a row-major matrix.
    pub fn value(&self, entries: &[f64]) -> Result<f64> {
        let n = self.ambient_dim;
        if entries.len() != n * n {
            return Err(Error::domain(format!(
                "gauge expects a {n}x{n} matrix, got {} entries",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("matrix has non-finite entries"));
        }
        if self.kind == GaugeKind::AffineBlock {
            let last_col_ok = (0..n).all(|i| {
                let v = entries[i * n + n - 1];
                if i + 1 == n {
                    v == 1.0
                } else {
                    v == 0.0
                }
            });
            if !last_col_ok {
                return Err(Error::domain(
                    "affine-block gauge expects last column (0, ..., 0, 1)",
                ));
            }
        }
        Ok(match self.kind {
            GaugeKind::Frobenius | GaugeKind::AffineBlock => {
                entries.iter().map(|v| v * v).sum::<f64>().sqrt()
            }
            GaugeKind::EntryPower { half_degree } => entries
                .iter()
                .map(|v| (v * v).powi(half_degree as i32))
                .sum(),
        })
    }

    /// `log P(m)`; the zero matrix is outside the domain.
    pub fn height(&self, entries: &[f64]) -> Result<Height> {
        let p = self.value(entries)?;
        if p <= 0.0 {
            return Err(Error::domain("height of the zero matrix is undefined"));
        }
        Ok(Height(p.ln()))
    }

    /// Frobenius height of a complex matrix given as `(re, im)` entries:
    /// `½·log Σ|z|²`.
    pub fn height_complex(&self, entries: &[(f64, f64)]) -> Result<Height> {
        if self.kind != GaugeKind::Frobenius {
            return Err(Error::domain(
                "complex entries are supported for the Frobenius gauge only",
            ));
        }
        if entries.len() != self.ambient_dim * self.ambient_dim {
            return Err(Error::domain("complex matrix has the wrong size"));
        }
        let s: f64 = entries.iter().map(|(a, b)| a * a + b * b).sum();
        if s <= 0.0 {
            return Err(Error::domain("height of the zero matrix is undefined"));
        }
        Ok(Height(0.5 * s.ln()))
    }

    /// Closed ball membership `log P(m) ≤ t` up to [`HEIGHT_TOL`].
    pub fn in_ball(&self, entries: &[f64], t: Height) -> Result<bool> {
        Ok(self.height(entries)?.0 <= t.0 + HEIGHT_TOL)
    }
}

/// Frobenius height `½·log S` of an exact matrix with squared norm `S`.
pub fn height_from_sq(sq: u128) -> Result<Height> {
    if sq == 0 {
        return Err(Error::domain("height of the zero matrix is undefined"));
    }
    Ok(Height(0.5 * (sq as f64).ln()))
}

/// Exact integer threshold for Frobenius balls: an integer matrix with
/// squared norm `S` lies in the closed ball of radius `e^t` iff
/// `S ≤ max_sq`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallBound {
    pub max_sq: u128,
    t: f64,
}

/// Largest `t` for which `e^{2t}` fits the 128-bit squared-norm budget
/// (entries below 2^62).
pub const MAX_EXACT_T: f64 = 42.9;

impl BallBound {
    pub fn new(t: Height) -> Result<Self> {
        let t = t.0;
        if !t.is_finite() {
            return Err(Error::domain("ball parameter must be finite"));
        }
        if t > MAX_EXACT_T {
            return Err(Error::Budget(format!(
                "t = {t} exceeds the checked-integer budget (t ≤ {MAX_EXACT_T})"
            )));
        }
        // S ≤ e^{2(t + tol)} with S an integer.
        let bound = (2.0 * (t + HEIGHT_TOL)).exp();
        let max_sq = if bound < 1.0 { 0 } else { bound.floor() as u128 };
        Ok(Self { max_sq, t })
    }

    #[inline]
    pub fn contains(&self, sq: u128) -> bool {
        sq <= self.max_sq
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// Largest admissible absolute value of a single integer entry.
    pub fn max_entry(&self) -> i64 {
        isqrt(self.max_sq) as i64
    }
}

/// Integer square root `⌊√n⌋`.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x.checked_mul(x).is_none_or(|sq| sq > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|sq| sq <= n) {
        x += 1;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn frobenius_heights() {
        let g = GaugeFunction::frobenius(2);
        let h = g.height(&[1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((h.0 - 0.5 * LN2).abs() < 1e-15);
        assert!((h.0 - 0.346574).abs() < 1e-6);
        let h = g.height(&[2.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((h.0 - 0.5 * 7f64.ln()).abs() < 1e-15);
        assert!((h.0 - 0.972955).abs() < 1e-6);
    }

    #[test]
    fn affine_block_height_of_identity() {
        let g = GaugeFunction::affine_block(2);
        let m = [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert!((g.height(&m).unwrap().0 - 0.5 * 3f64.ln()).abs() < 1e-15);
        let bad = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0];
        assert!(g.height(&bad).is_err());
    }

    #[test]
    fn zero_matrix_is_a_domain_error() {
        let g = GaugeFunction::frobenius(2);
        assert!(matches!(g.height(&[0.0; 4]), Err(Error::Domain(_))));
        assert!(height_from_sq(0).is_err());
    }

    #[test]
    fn ball_membership_is_closed() {
        let g = GaugeFunction::frobenius(2);
        let id = [1.0, 0.0, 0.0, 1.0];
        assert!(g.in_ball(&id, Height(0.3466)).unwrap());
        assert!(!g.in_ball(&id, Height(0.3)).unwrap());
        let j = [0.0, 1.0, -1.0, 0.0];
        assert!(g.in_ball(&j, Height(0.5 * LN2)).unwrap());
        let b = BallBound::new(Height(0.5 * LN2)).unwrap();
        assert_eq!(b.max_sq, 2);
        assert!(b.contains(2) && !b.contains(3));
    }

    #[test]
    fn exact_bound_at_integer_radii() {
        for n in 1..=400u128 {
            let b = BallBound::new(Height(0.5 * (n as f64).ln())).unwrap();
            assert_eq!(b.max_sq, n, "n = {n}");
        }
        assert_eq!(BallBound::new(Height(-1.0)).unwrap().max_sq, 0);
        assert!(BallBound::new(Height(50.0)).is_err());
    }

    #[test]
    fn isqrt_edges() {
        for n in 0..2000u128 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        let big = (1u128 << 124) + 12345;
        let r = isqrt(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
    }

    #[test]
    fn entry_power_rejects_odd_degree() {
        assert!(GaugeFunction::entry_power(2, 3).is_err());
        let g = GaugeFunction::entry_power(2, 4).unwrap();
        assert_eq!(g.degree(), 4);
        assert!((g.value(&[1.0, 2.0, 0.0, 1.0]).unwrap() - 18.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn frobenius_homogeneity(m in proptest::array::uniform4(-10.0f64..10.0),
                                 lambda in prop::sample::select(vec![2.0, 0.5, -3.0])) {
            prop_assume!(m.iter().any(|v| v.abs() > 1e-3));
            let g = GaugeFunction::frobenius(2);
            let scaled: Vec<f64> = m.iter().map(|v| v * lambda).collect();
            let lhs = g.height(&scaled).unwrap().0;
            let rhs = g.height(&m).unwrap().0 + f64::ln(f64::abs(lambda));
            prop_assert!((lhs - rhs).abs() < 1e-12);
        }

        #[test]
        fn entry_power_homogeneity(m in proptest::array::uniform4(-5.0f64..5.0), lambda in 0.1f64..4.0) {
            prop_assume!(m.iter().any(|v| v.abs() > 1e-2));
            let g = GaugeFunction::entry_power(2, 4).unwrap();
            let scaled: Vec<f64> = m.iter().map(|v| -v * lambda).collect();
            let ratio = g.value(&scaled).unwrap() / g.value(&m).unwrap();
            prop_assert!((ratio / lambda.powi(4) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn adjugate_symmetry_on_sl2(a in -50i64..50, c in -50i64..50, k in -5i64..5) {
            // Any primitive column completes to an SL2 matrix; the inverse is
            // the adjugate and has the same Frobenius norm.
            prop_assume!(crate::arith::gcd_i64(a, c) == 1);
            let (b0, d0) = crate::arith::bezout_completion(a, c).unwrap();
            let (b, d) = (b0 + k * a, d0 + k * c);
            let g = GaugeFunction::frobenius(2);
            let m = [a as f64, b as f64, c as f64, d as f64];
            let inv = [d as f64, -(b as f64), -(c as f64), a as f64];
            prop_assert_eq!(g.height(&m).unwrap(), g.height(&inv).unwrap());
        }

        #[test]
        fn coarse_admissibility_sandwich(h in proptest::array::uniform4(-20.0f64..20.0),
                                         p in proptest::array::uniform4(-0.5f64..0.5),
                                         q in proptest::array::uniform4(-0.5f64..0.5)) {
            use crate::matrix::Mat2;
            let hm = Mat2::from_entries(&h);
            prop_assume!(hm.frobenius() > 1e-3);
            // g1, g2 in the compact set {I + E : |E_ij| ≤ 1/2}.
            let g1 = Mat2::identity().add(&Mat2::from_entries(&p));
            let g2 = Mat2::identity().add(&Mat2::from_entries(&q));
            let c = g1.op_norm().ln() + g2.op_norm().ln();
            let g = GaugeFunction::frobenius(2);
            let t_h = g.height(hm.entries()).unwrap().0;
            let t_moved = g.height((g1 * hm * g2).entries()).unwrap().0;
            prop_assert!(t_moved <= t_h + c + 1e-12);
            let c_inv = g1.inverse().unwrap().op_norm().ln() + g2.inverse().unwrap().op_norm().ln();
            prop_assert!(t_h <= t_moved + c_inv + 1e-12);
        }
    }
}
