//! Homogeneous-space models `X = H\G` with right lattice actions, charts,
//! reference densities and limiting densities.
//!
//! Points are row vectors and the lattice acts on the right, `x ↦ x·γ`.
//!
//! | model | point | chart | chart measure `dξ` |
//! |---|---|---|---|
//! | affine plane | `(x₁, x₂)` | identity | `dx` |
//! | punctured plane | `(x₁, x₂)` | identity | `dx` |
//! | projective line | `(cos θ, sin θ)` | `θ ∈ [0, π)` | `dθ/π` |
//! | de Sitter, d = 2 | `(x₁, x₂, x₃)`, `x₁² + x₂² − x₃² = 1` | `(r, φ)` | `cosh r dr dφ/2π` |
//! | de Sitter, d = 3 | `(x₀, x₁, x₂, x₃)`, `x₁² + x₂² + x₃² − x₀² = 1` | `(r, θ, φ)` | `cosh² r sin θ dr dθ dφ/4π` |
//!
//! On de Sitter space `sinh r` is the time coordinate (`x₃` for d = 2, `x₀`
//! for d = 3) and the remaining coordinates are `cosh r` times a unit vector.

mod test_function;

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use test_function::{Shape, TestFunction};

use crate::arith::embed::{spin_matrix, sym_square_orthonormal};
use crate::arith::{Family, GroupElement, GroupSpec};
use crate::matrix::{Mat2, Mat3, Mat4};
use crate::stats::composite_gauss;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    /// ℝ² under ⟨a⟩ ⋉ ℤ².
    AffineSolvable,
    /// ℝ² under SL₂(ℤ) ⋉ ℤ².
    AffineSl2z,
    /// ℝ² ∖ {0} under SL₂(ℤ).
    PuncturedPlane,
    /// ℙ¹(ℝ) under SL₂(ℤ).
    ProjectiveLine,
    /// Two-dimensional de Sitter space under sym²(SL₂(ℤ)).
    #[serde(rename = "de-sitter-2")]
    DeSitter2,
    /// Three-dimensional de Sitter space under spin(SL₂(ℤ[i])).
    #[serde(rename = "de-sitter-3")]
    DeSitter3,
}

impl SpaceKind {
    pub const ALL: [SpaceKind; 6] = [
        SpaceKind::AffineSolvable,
        SpaceKind::AffineSl2z,
        SpaceKind::PuncturedPlane,
        SpaceKind::ProjectiveLine,
        SpaceKind::DeSitter2,
        SpaceKind::DeSitter3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::AffineSolvable => "affine-solvable",
            SpaceKind::AffineSl2z => "affine-sl2z",
            SpaceKind::PuncturedPlane => "punctured-plane",
            SpaceKind::ProjectiveLine => "projective-line",
            SpaceKind::DeSitter2 => "de-sitter-2",
            SpaceKind::DeSitter3 => "de-sitter-3",
        }
    }

    /// Lattice family acting on this space.
    pub fn family(self) -> Family {
        match self {
            SpaceKind::AffineSolvable => Family::CyclicSolvable,
            SpaceKind::AffineSl2z => Family::Sl2zAffine,
            SpaceKind::PuncturedPlane | SpaceKind::ProjectiveLine => Family::Sl2z,
            SpaceKind::DeSitter2 => Family::Sl2zSymSquare,
            SpaceKind::DeSitter3 => Family::Sl2GaussSpin,
        }
    }

    /// `(a, b)` in `V(t) = e^{at} tᵇ`.
    pub fn normalization(self) -> Normalization {
        let (a, b) = match self {
            SpaceKind::AffineSolvable => (0.0, 1),
            SpaceKind::AffineSl2z => (2.0, 0),
            SpaceKind::PuncturedPlane => (1.0, 0),
            SpaceKind::ProjectiveLine => (2.0, 0),
            SpaceKind::DeSitter2 => (0.0, 1),
            SpaceKind::DeSitter3 => (1.0, 0),
        };
        Normalization { a, b }
    }

    pub fn point_dim(self) -> usize {
        match self {
            SpaceKind::DeSitter2 => 3,
            SpaceKind::DeSitter3 => 4,
            _ => 2,
        }
    }

    pub fn chart_dim(self) -> usize {
        match self {
            SpaceKind::ProjectiveLine => 1,
            SpaceKind::DeSitter3 => 3,
            _ => 2,
        }
    }

    /// Coordinate names used for chart boxes in configuration files.
    pub fn chart_names(self) -> &'static [&'static str] {
        match self {
            SpaceKind::ProjectiveLine => &["theta"],
            SpaceKind::DeSitter2 => &["r", "phi"],
            SpaceKind::DeSitter3 => &["r", "theta", "phi"],
            _ => &["x1", "x2"],
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SpaceKind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = SpaceKind::ALL.iter().map(|k| k.name()).collect();
            Error::config("model", format!("unknown model {s:?}, expected one of {names:?}"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub a: f64,
    pub b: u32,
}

impl Normalization {
    pub fn value(&self, t: f64) -> f64 {
        (self.a * t).exp() * t.powi(self.b as i32)
    }
}

/// A point in the model's ambient coordinates; unused trailing slots are 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point(pub [f64; 4]);

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        let mut p = [0.0; 4];
        p[..coords.len()].copy_from_slice(coords);
        Point(p)
    }
}

/// Fixed-point scale for exact affine actions: coordinates are rounded to
/// multiples of `2^-AFFINE_BITS`.
pub const AFFINE_BITS: u32 = 40;
const AFFINE_SCALE: f64 = (1u64 << AFFINE_BITS) as f64;
const AFFINE_LIMIT: f64 = (1u64 << 20) as f64;

/// `x·h` for a row vector `x` on the `2^-AFFINE_BITS` grid, split exactly
/// into an integer part and a fractional part in `[0, 1)`.
#[inline]
pub fn affine_split(x: [f64; 2], h: &[i128; 4]) -> Result<([i128; 2], [f64; 2])> {
    if !(x[0].abs() < AFFINE_LIMIT && x[1].abs() < AFFINE_LIMIT) {
        return Err(Error::domain(format!("affine point {x:?} outside |x| < 2^20")));
    }
    let m = [(x[0] * AFFINE_SCALE).round() as i128, (x[1] * AFFINE_SCALE).round() as i128];
    let ovf = || Error::Overflow("affine action");
    let mut q = [0i128; 2];
    let mut frac = [0.0; 2];
    for j in 0..2 {
        let num = m[0]
            .checked_mul(h[j])
            .and_then(|p| m[1].checked_mul(h[2 + j]).and_then(|r| p.checked_add(r)))
            .ok_or_else(ovf)?;
        q[j] = num >> AFFINE_BITS;
        frac[j] = (num & ((1i128 << AFFINE_BITS) - 1)) as f64 / AFFINE_SCALE;
    }
    Ok((q, frac))
}

/// Recombines an integer part and a fractional part into a coordinate.
#[inline]
pub fn affine_join(q: i128, v: i128, frac: f64) -> f64 {
    (q + v) as f64 + frac
}

/// A group element prepared for repeated application to points.
#[derive(Debug, Clone)]
pub enum Prepared {
    Affine { h: [i128; 4], v: [i64; 2] },
    Row2(Mat2),
    Projective(Mat2),
    Row3(Mat3),
    Row4(Mat4),
}

impl Prepared {
    #[inline]
    pub fn apply(&self, x: &Point) -> Result<Point> {
        let p = &x.0;
        Ok(match self {
            Prepared::Affine { h, v } => {
                let (q, frac) = affine_split([p[0], p[1]], h)?;
                Point([affine_join(q[0], v[0] as i128, frac[0]), affine_join(q[1], v[1] as i128, frac[1]), 0.0, 0.0])
            }
            Prepared::Row2(m) => {
                let y = m.row_apply(&[p[0], p[1]]);
                Point([y[0], y[1], 0.0, 0.0])
            }
            Prepared::Projective(m) => {
                let y = m.row_apply(&[p[0], p[1]]);
                Point(projective_normalize(y))
            }
            Prepared::Row3(m) => {
                let y = m.row_apply(&[p[0], p[1], p[2]]);
                Point([y[0], y[1], y[2], 0.0])
            }
            Prepared::Row4(m) => Point(m.row_apply(p)),
        })
    }
}

fn projective_normalize(y: [f64; 2]) -> [f64; 4] {
    let n = y[0].hypot(y[1]);
    let (mut c, mut s) = (y[0] / n, y[1] / n);
    if s < 0.0 || (s == 0.0 && c < 0.0) {
        c = -c;
        s = -s;
    }
    [c, s, 0.0, 0.0]
}

/// A homogeneous space together with its lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceModel {
    pub kind: SpaceKind,
    pub spec: GroupSpec,
    pub normalization: Normalization,
    /// Exponent `p` of the affine SL₂(ℤ) density `(1 + ‖x‖²)^{-p}`.
    pub affine_exponent: f64,
}

/// Default for [`SpaceModel::affine_exponent`], `(d − 1)/2` with d = 2.
pub const DEFAULT_AFFINE_EXPONENT: f64 = 0.5;

impl SpaceModel {
    pub fn new(kind: SpaceKind) -> Self {
        Self {
            kind,
            spec: GroupSpec::new(kind.family()),
            normalization: kind.normalization(),
            affine_exponent: DEFAULT_AFFINE_EXPONENT,
        }
    }

    pub fn affine_solvable(generator: [[i64; 2]; 2]) -> Result<Self> {
        Ok(Self {
            spec: GroupSpec::cyclic_solvable(generator)?,
            ..Self::new(SpaceKind::AffineSolvable)
        })
    }

    pub fn with_affine_exponent(mut self, p: f64) -> Self {
        self.affine_exponent = p;
        self
    }

    pub fn id(&self) -> &'static str {
        self.kind.name()
    }

    /// Checks that `x` lies on the model's variety.
    pub fn validate(&self, x: &Point) -> Result<()> {
        let p = &x.0;
        let dim = self.kind.point_dim();
        if p.iter().take(dim).any(|v| !v.is_finite()) || p[dim..].iter().any(|v| *v != 0.0) {
            return Err(Error::domain(format!("point {p:?} is not a finite {dim}-vector")));
        }
        let off = |what: &str| Err(Error::domain(format!("point {p:?} is off the {what}")));
        match self.kind {
            SpaceKind::AffineSolvable | SpaceKind::AffineSl2z => Ok(()),
            SpaceKind::PuncturedPlane => {
                if p[0] == 0.0 && p[1] == 0.0 {
                    return off("punctured plane");
                }
                Ok(())
            }
            SpaceKind::ProjectiveLine => {
                let n = p[0].hypot(p[1]);
                if (n - 1.0).abs() > 1e-10 || p[1] < 0.0 || (p[1] == 0.0 && p[0] < 0.0) {
                    return off("normalized projective representatives");
                }
                Ok(())
            }
            SpaceKind::DeSitter2 | SpaceKind::DeSitter3 => {
                let (q, scale) = self.quadric(x);
                if (q - 1.0).abs() > 1e-10 * scale {
                    return off("de Sitter quadric");
                }
                Ok(())
            }
        }
    }

    /// Value of the defining quadratic form and the magnitude it is made of.
    pub fn quadric(&self, x: &Point) -> (f64, f64) {
        let p = &x.0;
        match self.kind {
            SpaceKind::DeSitter2 => (p[0] * p[0] + p[1] * p[1] - p[2] * p[2], 1.0 + p[..3].iter().map(|v| v * v).sum::<f64>()),
            SpaceKind::DeSitter3 => (
                p[1] * p[1] + p[2] * p[2] + p[3] * p[3] - p[0] * p[0],
                1.0 + p.iter().map(|v| v * v).sum::<f64>(),
            ),
            _ => (1.0, 1.0),
        }
    }

    pub fn prepare(&self, g: &GroupElement) -> Result<Prepared> {
        let need_real = || Error::domain(format!("{} needs an integer element, got {g}", self.id()));
        Ok(match self.kind {
            SpaceKind::AffineSolvable | SpaceKind::AffineSl2z => {
                let e = g.real_entries().ok_or_else(need_real)?;
                Prepared::Affine {
                    h: e.map(|v| v as i128),
                    v: g.translation.unwrap_or([0, 0]),
                }
            }
            SpaceKind::PuncturedPlane => Prepared::Row2(g.to_mat2().ok_or_else(need_real)?),
            SpaceKind::ProjectiveLine => Prepared::Projective(g.to_mat2().ok_or_else(need_real)?),
            SpaceKind::DeSitter2 => Prepared::Row3(sym_square_orthonormal(g)?),
            // x·γ := S(γ*)·x, written as a row product with S(γ*)ᵀ.
            SpaceKind::DeSitter3 => Prepared::Row4(spin_matrix(&g.conj_transpose()).transpose()),
        })
    }

    /// Right action `x·γ`.
    pub fn act(&self, x: &Point, g: &GroupElement) -> Result<Point> {
        self.validate(x)?;
        self.prepare(g)?.apply(x)
    }

    /// Chart coordinates of a point (see the module table).
    pub fn chart(&self, x: &Point) -> Result<[f64; 3]> {
        self.validate(x)?;
        Ok(self.chart_unchecked(x))
    }

    #[inline]
    pub fn chart_unchecked(&self, x: &Point) -> [f64; 3] {
        let p = &x.0;
        match self.kind {
            SpaceKind::ProjectiveLine => {
                let th = p[1].atan2(p[0]).rem_euclid(PI);
                [th, 0.0, 0.0]
            }
            SpaceKind::DeSitter2 => {
                let r = p[2].asinh();
                [r, p[1].atan2(p[0]).rem_euclid(2.0 * PI), 0.0]
            }
            SpaceKind::DeSitter3 => {
                let r = p[0].asinh();
                let n = (p[1] * p[1] + p[2] * p[2] + p[3] * p[3]).sqrt();
                let theta = (p[3] / n).clamp(-1.0, 1.0).acos();
                [r, theta, p[2].atan2(p[1]).rem_euclid(2.0 * PI)]
            }
            _ => [p[0], p[1], 0.0],
        }
    }

    /// Time coordinate `sinh r` on de Sitter models.
    #[inline]
    pub fn time_coordinate(&self, x: &Point) -> Option<f64> {
        match self.kind {
            SpaceKind::DeSitter2 => Some(x.0[2]),
            SpaceKind::DeSitter3 => Some(x.0[0]),
            _ => None,
        }
    }

    pub fn from_chart(&self, c: &[f64]) -> Result<Point> {
        if c.len() != self.kind.chart_dim() || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "{} chart expects {} finite coordinates, got {c:?}",
                self.id(),
                self.kind.chart_dim()
            )));
        }
        let p = match self.kind {
            SpaceKind::ProjectiveLine => Point(projective_normalize([c[0].cos(), c[0].sin()])),
            SpaceKind::DeSitter2 => {
                let (ch, sh) = (c[0].cosh(), c[0].sinh());
                Point::new(&[c[1].cos() * ch, c[1].sin() * ch, sh])
            }
            SpaceKind::DeSitter3 => {
                let (ch, sh) = (c[0].cosh(), c[0].sinh());
                let (st, ct) = c[1].sin_cos();
                let (sp, cp) = c[2].sin_cos();
                Point([sh, ch * st * cp, ch * st * sp, ch * ct])
            }
            _ => Point::new(c),
        };
        self.validate(&p)?;
        Ok(p)
    }

    /// Density of `ξ` with respect to Lebesgue measure in chart coordinates.
    pub fn chart_density(&self, c: &[f64]) -> f64 {
        match self.kind {
            SpaceKind::ProjectiveLine => 1.0 / PI,
            SpaceKind::DeSitter2 => c[0].cosh() / (2.0 * PI),
            SpaceKind::DeSitter3 => c[0].cosh().powi(2) * c[1].sin() / (4.0 * PI),
            _ => 1.0,
        }
    }

    /// Limiting density `Θ̃(x, y)` relative to `ξ`, up to one model constant.
    pub fn limit_density(&self, x: &Point, y: &Point) -> Result<f64> {
        let cx = self.chart(x)?;
        let cy = self.chart(y)?;
        self.limit_density_chart(&cx, &cy)
    }

    pub fn limit_density_chart(&self, cx: &[f64], cy: &[f64]) -> Result<f64> {
        Ok(match self.kind {
            SpaceKind::DeSitter2 => 1.0,
            SpaceKind::DeSitter3 => 1.0 / (cx[0].cosh() * cy[0].cosh()),
            SpaceKind::ProjectiveLine | SpaceKind::AffineSolvable => 1.0,
            SpaceKind::PuncturedPlane => {
                let nx = cx[0].hypot(cx[1]);
                let ny = cy[0].hypot(cy[1]);
                if nx == 0.0 || ny == 0.0 {
                    return Err(Error::domain("punctured-plane density has a pole at 0"));
                }
                1.0 / (nx * ny)
            }
            SpaceKind::AffineSl2z => (1.0 + cx[0] * cx[0] + cx[1] * cx[1]).powf(-self.affine_exponent),
        })
    }

    /// `∫ φ(y) w(y) dξ(y)` over the support box of `φ` by tensor Gauss–Legendre
    /// quadrature with `panels` panels of order 8 per coordinate.
    pub fn chart_integral<W>(&self, phi: &TestFunction, mut weight: W, panels: usize) -> Result<f64>
    where
        W: FnMut(&[f64]) -> f64,
    {
        let dim = self.kind.chart_dim();
        if phi.dim() != dim {
            return Err(Error::domain(format!(
                "test function has {} coordinates, {} chart has {dim}",
                phi.dim(),
                self.id()
            )));
        }
        let rules: Vec<Vec<(f64, f64)>> = phi
            .support_box()
            .iter()
            .map(|&(lo, hi)| composite_gauss(lo, hi, panels, 8))
            .collect();
        let mut idx = vec![0usize; dim];
        let mut total = crate::stats::CompensatedSum::new();
        let mut c = vec![0.0; dim];
        'outer: loop {
            let mut w = 1.0;
            for k in 0..dim {
                let (x, wk) = rules[k][idx[k]];
                c[k] = x;
                w *= wk;
            }
            let f = phi.eval(&c);
            if f != 0.0 {
                total.add(w * f * weight(&c) * self.chart_density(&c));
            }
            for k in (0..dim).rev() {
                idx[k] += 1;
                if idx[k] < rules[k].len() {
                    continue 'outer;
                }
                idx[k] = 0;
            }
            break;
        }
        Ok(total.value())
    }

    /// `∫ φ(y) Θ̃(x, y) dξ(y)`, the predicted limit up to the model constant.
    pub fn predicted_integral(&self, x: &Point, phi: &TestFunction, panels: usize) -> Result<f64> {
        let cx = self.chart(x)?;
        let mut err = None;
        let v = self.chart_integral(
            phi,
            |cy| match self.limit_density_chart(&cx, cy) {
                Ok(d) => d,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            panels,
        )?;
        match err {
            Some(e) => Err(e),
            None => Ok(v),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sl2z(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::sl2z(a, b, c, d).unwrap()
    }

    #[test]
    fn action_examples() {
        let m = SpaceModel::new(SpaceKind::AffineSl2z);
        let g = sl2z(1, 1, 0, 1).with_translation([2, -1]);
        let y = m.act(&Point::new(&[0.3, 0.7]), &g).unwrap();
        assert!((y.0[0] - 2.3).abs() < 1e-12 && y.0[1].abs() < 1e-12, "{y:?}");

        let m = SpaceModel::new(SpaceKind::ProjectiveLine);
        let y = m.act(&Point::new(&[1.0, 0.0]), &sl2z(0, 1, -1, 0)).unwrap();
        assert_eq!(y, Point::new(&[0.0, 1.0]));

        // Right action through the conjugate transpose.
        let m = SpaceModel::new(SpaceKind::DeSitter3);
        let y = m.act(&Point::new(&[0.0, 1.0, 0.0, 0.0]), &sl2z(1, 0, 1, 1)).unwrap();
        assert_eq!(y, Point::new(&[1.0, 1.0, 0.0, 1.0]));
    }

    #[test]
    fn polar_chart_examples() {
        let m = SpaceModel::new(SpaceKind::DeSitter3);
        let p = m.from_chart(&[0.0, PI / 2.0, 0.0]).unwrap();
        assert!((p.0[1] - 1.0).abs() < 1e-15 && p.0[0] == 0.0);
        let m2 = SpaceModel::new(SpaceKind::DeSitter2);
        assert_eq!(m2.from_chart(&[0.0, 0.0]).unwrap(), Point::new(&[1.0, 0.0, 0.0]));
        assert_eq!(m2.chart_density(&[0.7, 1.0]), 0.7f64.cosh() / (2.0 * PI));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let c = [rng.random_range(-3.0..3.0), rng.random_range(0.01..3.13), rng.random_range(0.0..6.28)];
            let back = m.chart(&m.from_chart(&c).unwrap()).unwrap();
            assert!(c.iter().zip(back).all(|(u, v)| (u - v).abs() < 1e-10), "{c:?} {back:?}");
            let c2 = [c[0], c[2]];
            let back2 = m2.chart(&m2.from_chart(&c2).unwrap()).unwrap();
            assert!((c2[0] - back2[0]).abs() < 1e-10 && (c2[1] - back2[1]).abs() < 1e-10);
        }
        assert!(m.chart(&Point::new(&[0.0, 2.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn limit_density_examples() {
        let m = SpaceModel::new(SpaceKind::DeSitter3);
        let x = m.from_chart(&[0.0, 1.0, 2.0]).unwrap();
        assert!((m.limit_density(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let y = m.from_chart(&[1.0, 0.3, 0.2]).unwrap();
        assert!((m.limit_density(&y, &x).unwrap() - 0.648054).abs() < 1e-6);
        assert_eq!(m.limit_density(&x, &y).unwrap(), m.limit_density(&y, &x).unwrap());
        let p = SpaceModel::new(SpaceKind::ProjectiveLine);
        let a = p.from_chart(&[0.3]).unwrap();
        let b = p.from_chart(&[2.0]).unwrap();
        assert_eq!(p.limit_density(&a, &b).unwrap(), 1.0);
        let pp = SpaceModel::new(SpaceKind::PuncturedPlane);
        assert!(pp.limit_density_chart(&[1.0, 0.0], &[0.0, 0.0]).is_err());
        assert_eq!(pp.limit_density_chart(&[3.0, 4.0], &[0.0, 2.0]).unwrap(), 0.1);
    }

    #[test]
    fn chart_integral_matches_closed_form() {
        let m = SpaceModel::new(SpaceKind::DeSitter2);
        let phi = TestFunction::indicator(&[0.5, 0.0], &[1.5, 1.0]).unwrap();
        let v = m.chart_integral(&phi, |_| 1.0, 4).unwrap();
        let exact = (1.5f64.sinh() - 0.5f64.sinh()) * 1.0 / (2.0 * PI);
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn solvable_exact_action_at_large_powers() {
        let m = SpaceModel::affine_solvable([[2, 1], [1, 1]]).unwrap();
        let gen = m.spec.generator().unwrap();
        let x = Point::new(&[0.3125, 0.625]);
        // a⁵⁰ has entries near 10²¹; the exact fractional part of x·a⁵⁰ survives.
        let e = gen.power_wide(50).unwrap();
        let y = Prepared::Affine { h: e, v: [0, 0] }.apply(&x).unwrap();
        assert!(m.validate(&y).is_ok());
        let (q, frac) = affine_split([x.0[0], x.0[1]], &e).unwrap();
        let num0 = 5 * e[0] + 10 * e[2]; // x = (5/16, 10/16)
        assert_eq!(q[0], num0.div_euclid(16));
        assert_eq!(frac[0], num0.rem_euclid(16) as f64 / 16.0);
        assert_eq!(affine_join(q[0], 0, frac[0]), y.0[0]);
    }

    fn random_element(rng: &mut ChaCha8Rng, gaussian: bool) -> GroupElement {
        use crate::arith::gaussian::{bezout_completion, GaussInt};
        loop {
            let mut gi = || GaussInt::new(rng.random_range(-4..=4), if gaussian { rng.random_range(-4..=4) } else { 0 });
            let (a, c, k) = (gi(), gi(), gi());
            if let Ok(Some((b, d))) = bezout_completion(a, c) {
                let b = b.checked_add(k.checked_mul(a).unwrap()).unwrap();
                let d = d.checked_add(k.checked_mul(c).unwrap()).unwrap();
                return GroupElement::gaussian([a, b, c, d]).unwrap();
            }
        }
    }

    #[test]
    fn right_action_on_every_model() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for kind in SpaceKind::ALL {
            let m = SpaceModel::new(kind);
            for _ in 0..100 {
                let (g1, g2) = match kind {
                    SpaceKind::AffineSolvable => {
                        let gen = m.spec.generator().unwrap();
                        let mut one = || {
                            let n = rng.random_range(-6..=6);
                            gen.power(n).unwrap().with_power(n).with_translation([rng.random_range(-5..=5), rng.random_range(-5..=5)])
                        };
                        (one(), one())
                    }
                    SpaceKind::AffineSl2z => {
                        let mut one = || random_element(&mut rng, false).with_translation([rng.random_range(-5..=5), rng.random_range(-5..=5)]);
                        (one(), one())
                    }
                    SpaceKind::DeSitter3 => (random_element(&mut rng, true), random_element(&mut rng, true)),
                    _ => (random_element(&mut rng, false), random_element(&mut rng, false)),
                };
                let c: Vec<f64> = match kind.chart_dim() {
                    1 => vec![rng.random_range(0.0..PI)],
                    2 if matches!(kind, SpaceKind::DeSitter2) => vec![rng.random_range(-1.0..1.0), rng.random_range(0.0..6.28)],
                    2 => vec![rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                    _ => vec![rng.random_range(-1.0..1.0), rng.random_range(0.1..3.0), rng.random_range(0.0..6.28)],
                };
                let x = m.from_chart(&c).unwrap();
                let lhs = m.act(&m.act(&x, &g1).unwrap(), &g2).unwrap();
                let rhs = m.act(&x, &g1.checked_mul(&g2).unwrap()).unwrap();
                let scale = 1.0 + lhs.0.iter().map(|v| v.abs()).fold(0.0, f64::max);
                let diff = lhs.0.iter().zip(rhs.0).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
                assert!(diff <= 1e-10 * scale, "{kind}: {lhs:?} vs {rhs:?}");
                if let SpaceKind::DeSitter2 | SpaceKind::DeSitter3 = kind {
                    let (q, s) = m.quadric(&lhs);
                    assert!((q - 1.0).abs() <= 1e-9 * s, "{kind}: Q = {q}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn de_sitter_density_positive_and_symmetric(r1 in -3.0f64..3.0, r2 in -3.0f64..3.0) {
            let m = SpaceModel::new(SpaceKind::DeSitter3);
            let a = m.limit_density_chart(&[r1, 1.0, 1.0], &[r2, 0.5, 0.5]).unwrap();
            let b = m.limit_density_chart(&[r2, 0.5, 0.5], &[r1, 1.0, 1.0]).unwrap();
            prop_assert!(a > 0.0);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn de_sitter_density_lipschitz(r1 in -2.0f64..2.0, r2 in -2.0f64..2.0, h in 1e-6f64..1e-2) {
            // On |r| ≤ 2 the kernel 1/(cosh r₁ cosh r₂) has Lipschitz constant ≤ 1.
            let m = SpaceModel::new(SpaceKind::DeSitter3);
            let a = m.limit_density_chart(&[r1, 1.0, 1.0], &[r2, 1.0, 1.0]).unwrap();
            let b = m.limit_density_chart(&[r1 + h, 1.0, 1.0], &[r2, 1.0, 1.0]).unwrap();
            prop_assert!((a - b).abs() <= h);
        }
    }
}
