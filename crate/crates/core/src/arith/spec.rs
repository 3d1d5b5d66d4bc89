use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::element::GroupElement;
use crate::gauge::{isqrt, BallBound, GaugeFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// SL₂(ℤ) with the Frobenius norm.
    Sl2z,
    /// SL₂(ℤ[i]) with `Σ |z|²`.
    Sl2Gauss,
    /// sym²(SL₂(ℤ)) ⊂ SO(2,1), gauge taken on the 3×3 image in orthonormal
    /// coordinates.
    Sl2zSymSquare,
    /// spin(SL₂(ℤ[i])) ⊂ SO(3,1), gauge taken on the 4×4 image.
    Sl2GaussSpin,
    /// SL₂(ℤ) ⋉ ℤ² with the 3×3 block gauge.
    Sl2zAffine,
    /// ⟨a⟩ ⋉ ℤ² for a hyperbolic `a`.
    CyclicSolvable,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Sl2z,
        Family::Sl2Gauss,
        Family::Sl2zSymSquare,
        Family::Sl2GaussSpin,
        Family::Sl2zAffine,
        Family::CyclicSolvable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Sl2z => "sl2z",
            Family::Sl2Gauss => "sl2-gauss",
            Family::Sl2zSymSquare => "sl2z-sym-square",
            Family::Sl2GaussSpin => "sl2-gauss-spin",
            Family::Sl2zAffine => "sl2z-affine",
            Family::CyclicSolvable => "cyclic-solvable",
        }
    }

    /// Whether the linear parts have Gaussian-integer entries.
    pub fn is_gaussian(self) -> bool {
        matches!(self, Family::Sl2Gauss | Family::Sl2GaussSpin)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                Error::config("family", format!("unknown family {s:?}, expected one of {names:?}"))
            })
    }
}

/// The hyperbolic generator `a` of a cyclic-solvable group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CyclicGenerator {
    pub matrix: [[i64; 2]; 2],
    pub lambda_max: f64,
    pub lambda_min: f64,
}

impl CyclicGenerator {
    pub fn new(matrix: [[i64; 2]; 2]) -> Result<Self> {
        let [[a, b], [c, d]] = matrix;
        let det = a as i128 * d as i128 - b as i128 * c as i128;
        if det != 1 {
            return Err(Error::domain(format!("generator determinant is {det}, not 1")));
        }
        let tr = (a as i128 + d as i128).abs();
        // With det 1 the eigenvalues are real with modulus ≠ 1 iff |tr| > 2.
        if tr <= 2 {
            return Err(Error::domain(format!("generator with |trace| = {tr} is not hyperbolic")));
        }
        let tr = tr as f64;
        let lambda_max = 0.5 * (tr + (tr * tr - 4.0).sqrt());
        Ok(Self {
            matrix,
            lambda_max,
            lambda_min: 1.0 / lambda_max,
        })
    }

    /// Exact `aⁿ` for any integer `n`.
    pub fn power(&self, n: i64) -> Result<GroupElement> {
        let [[a, b], [c, d]] = self.matrix;
        let base = GroupElement::sl2z(a, b, c, d)?;
        let base = if n < 0 { base.inverse()? } else { base };
        let mut acc = GroupElement::identity();
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = sq.checked_mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// `aⁿ` with 128-bit entries, for powers whose entries exceed 64 bits
    /// (`|n| > 45` for the default generator).
    pub fn power_wide(&self, n: i64) -> Result<[i128; 4]> {
        let [[a, b], [c, d]] = self.matrix;
        let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
        let base = if n < 0 { [d, -b, -c, a] } else { [a, b, c, d] };
        let mul = |x: [i128; 4], y: [i128; 4]| -> Result<[i128; 4]> {
            let dot = |p: i128, q: i128, r: i128, s: i128| {
                p.checked_mul(q)
                    .zip(r.checked_mul(s))
                    .and_then(|(u, v)| u.checked_add(v))
                    .ok_or(Error::Overflow("generator power"))
            };
            Ok([
                dot(x[0], y[0], x[1], y[2])?,
                dot(x[0], y[1], x[1], y[3])?,
                dot(x[2], y[0], x[3], y[2])?,
                dot(x[2], y[1], x[3], y[3])?,
            ])
        };
        let mut acc = [1, 0, 0, 1];
        let mut sq = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = mul(acc, sq)?;
            }
            k >>= 1;
            if k > 0 {
                sq = mul(sq, sq)?;
            }
        }
        Ok(acc)
    }

    /// Integer interval `[t/log λ_min, t/log λ_max]` of admissible powers.
    pub fn power_range(&self, t: f64) -> (i64, i64) {
        let l = self.lambda_max.ln();
        let hi = ((t + crate::gauge::HEIGHT_TOL) / l).floor() as i64;
        (-hi, hi)
    }
}

impl Default for CyclicGenerator {
    fn default() -> Self {
        Self::new([[2, 1], [1, 1]]).expect("default generator is hyperbolic")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub family: Family,
    pub generator: Option<CyclicGenerator>,
    /// Gauge in the defining representation. For the cyclic-solvable family
    /// the height of `(aⁿ, v)` is `log ‖v‖`, and the gauge is recorded as the
    /// Euclidean norm on ℤ².
    pub gauge: GaugeFunction,
}

impl GroupSpec {
    pub fn new(family: Family) -> Self {
        let gauge = match family {
            Family::Sl2z | Family::Sl2Gauss | Family::CyclicSolvable => GaugeFunction::frobenius(2),
            Family::Sl2zSymSquare => GaugeFunction::frobenius(3),
            Family::Sl2GaussSpin => GaugeFunction::frobenius(4),
            Family::Sl2zAffine => GaugeFunction::affine_block(2),
        };
        let generator = (family == Family::CyclicSolvable).then(CyclicGenerator::default);
        Self { family, generator, gauge }
    }

    pub fn sl2z() -> Self {
        Self::new(Family::Sl2z)
    }

    pub fn sl2_gauss() -> Self {
        Self::new(Family::Sl2Gauss)
    }

    pub fn sym_square() -> Self {
        Self::new(Family::Sl2zSymSquare)
    }

    pub fn spin() -> Self {
        Self::new(Family::Sl2GaussSpin)
    }

    pub fn affine() -> Self {
        Self::new(Family::Sl2zAffine)
    }

    pub fn cyclic_solvable(matrix: [[i64; 2]; 2]) -> Result<Self> {
        Ok(Self {
            generator: Some(CyclicGenerator::new(matrix)?),
            ..Self::new(Family::CyclicSolvable)
        })
    }

    pub fn generator(&self) -> Result<&CyclicGenerator> {
        self.generator
            .as_ref()
            .ok_or_else(|| Error::domain("cyclic-solvable spec without a generator"))
    }

    /// Largest `Σ |entries|²` of a 2×2 linear part that can lie in the ball.
    ///
    /// sym² in orthonormal coordinates has `‖Λ‖² = S² − 1` and the spin image
    /// has `‖Λ‖² = S²`, where `S` is the 2×2 Frobenius square.
    pub fn linear_bound(&self, ball: &BallBound) -> u128 {
        let m = ball.max_sq;
        match self.family {
            Family::Sl2z | Family::Sl2Gauss => m,
            Family::Sl2zSymSquare => isqrt(m + 1),
            Family::Sl2GaussSpin => isqrt(m),
            Family::Sl2zAffine => m.saturating_sub(1),
            Family::CyclicSolvable => u128::MAX,
        }
    }

    /// Exact squared gauge of an element in the family's representation.
    pub fn gauge_sq(&self, g: &GroupElement) -> Result<u128> {
        let s = g.frobenius_sq();
        let out = match self.family {
            Family::Sl2z | Family::Sl2Gauss => Some(s),
            Family::Sl2zSymSquare => s.checked_mul(s).map(|x| x - 1),
            Family::Sl2GaussSpin => s.checked_mul(s),
            Family::Sl2zAffine => s.checked_add(g.translation_sq() + 1),
            Family::CyclicSolvable => Some(g.translation_sq()),
        };
        out.ok_or(Error::Overflow("gauge square"))
    }

    /// Exact ball membership for a group element.
    pub fn contains(&self, g: &GroupElement, ball: &BallBound) -> Result<bool> {
        if self.family == Family::CyclicSolvable {
            let n = g.power.unwrap_or(0);
            let (lo, hi) = self.generator()?.power_range(ball.t());
            if n < lo || n > hi {
                return Ok(false);
            }
        }
        Ok(ball.contains(self.gauge_sq(g)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_validation() {
        assert!(CyclicGenerator::new([[1, 1], [0, 1]]).is_err());
        assert!(CyclicGenerator::new([[0, 1], [-1, 0]]).is_err());
        assert!(CyclicGenerator::new([[2, 1], [1, 2]]).is_err());
        let g = CyclicGenerator::default();
        let golden_sq = (1.5 + 5f64.sqrt() / 2.0).powi(1);
        assert!((g.lambda_max - golden_sq).abs() < 1e-15);
        assert!((g.lambda_max * g.lambda_min - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generator_powers() {
        let g = CyclicGenerator::default();
        assert_eq!(g.power(0).unwrap(), GroupElement::identity());
        assert_eq!(g.power(2).unwrap().real_entries(), Some([5, 3, 3, 2]));
        let w = g.power_wide(-7).unwrap();
        assert_eq!(Some(w.map(|v| v as i64)), g.power(-7).unwrap().real_entries());
        assert!(g.power(50).is_err());
        assert!(g.power_wide(50).unwrap()[0] > i64::MAX as i128);
        let p = g.power(-3).unwrap().checked_mul(&g.power(3).unwrap()).unwrap();
        assert_eq!(p.real_entries(), Some([1, 0, 0, 1]));
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("sl3z".parse::<Family>().is_err());
    }
}
