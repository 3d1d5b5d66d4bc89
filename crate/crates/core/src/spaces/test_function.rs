use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Compactly supported, non-negative, bounded functions on a chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Shape {
    /// Indicator of the closed axis box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `Π (1 − s_i²)²` with `s_i = (x_i − center_i)/half_width_i`, zero off
    /// the box.
    TensorBump {
        center: Vec<f64>,
        half_width: Vec<f64>,
    },
    /// Piecewise-linear profile of `ρ = ‖(x − center)/scale‖` through the
    /// `(ρ, value)` knots, zero beyond the last knot.
    RadialPiecewise {
        center: Vec<f64>,
        scale: Vec<f64>,
        knots: Vec<[f64; 2]>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    #[serde(flatten)]
    pub shape: Shape,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn one() -> f64 {
    1.0
}

impl TestFunction {
    pub fn new(shape: Shape) -> Result<Self> {
        let f = Self { shape, amplitude: 1.0 };
        f.validate()?;
        Ok(f)
    }

    pub fn indicator(lo: &[f64], hi: &[f64]) -> Result<Self> {
        Self::new(Shape::Box { lo: lo.to_vec(), hi: hi.to_vec() })
    }

    pub fn bump(center: &[f64], half_width: &[f64]) -> Result<Self> {
        Self::new(Shape::TensorBump {
            center: center.to_vec(),
            half_width: half_width.to_vec(),
        })
    }

    pub fn radial(center: &[f64], scale: &[f64], knots: &[[f64; 2]]) -> Result<Self> {
        Self::new(Shape::RadialPiecewise {
            center: center.to_vec(),
            scale: scale.to_vec(),
            knots: knots.to_vec(),
        })
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    /// The same shape moved by `delta` in chart coordinates.
    pub fn translated(&self, delta: &[f64]) -> Self {
        let shift = |v: &[f64]| v.iter().zip(delta).map(|(x, d)| x + d).collect::<Vec<_>>();
        let shape = match &self.shape {
            Shape::Box { lo, hi } => Shape::Box { lo: shift(lo), hi: shift(hi) },
            Shape::TensorBump { center, half_width } => Shape::TensorBump {
                center: shift(center),
                half_width: half_width.clone(),
            },
            Shape::RadialPiecewise { center, scale, knots } => Shape::RadialPiecewise {
                center: shift(center),
                scale: scale.clone(),
                knots: knots.clone(),
            },
        };
        Self { shape, amplitude: self.amplitude }
    }

    pub fn dim(&self) -> usize {
        match &self.shape {
            Shape::Box { lo, .. } => lo.len(),
            Shape::TensorBump { center, .. } | Shape::RadialPiecewise { center, .. } => center.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: String| Err(Error::config(format!("phi.{key}"), reason));
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return bad("amplitude", format!("must be finite and non-negative, got {}", self.amplitude));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match &self.shape {
            Shape::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return bad("lo", "lo and hi must have the same non-zero length".into());
                }
                if !finite(lo) || !finite(hi) || lo.iter().zip(hi).any(|(l, h)| l >= h) {
                    return bad("hi", "box needs finite lo < hi in every coordinate".into());
                }
            }
            Shape::TensorBump { center, half_width } => {
                if center.is_empty() || center.len() != half_width.len() {
                    return bad("half_width", "must match the length of center".into());
                }
                if !finite(center) || half_width.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return bad("half_width", "must be finite and positive".into());
                }
            }
            Shape::RadialPiecewise { center, scale, knots } => {
                if center.is_empty() || center.len() != scale.len() {
                    return bad("scale", "must match the length of center".into());
                }
                if !finite(center) || scale.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return bad("scale", "must be finite and positive".into());
                }
                if knots.is_empty() {
                    return bad("knots", "need at least one knot".into());
                }
                if knots[0][0] != 0.0 {
                    return bad("knots", "first knot must be at radius 0".into());
                }
                if knots.windows(2).any(|w| w[1][0] <= w[0][0]) {
                    return bad("knots", "radii must increase".into());
                }
                if knots.iter().any(|k| !(k[1].is_finite() && k[1] >= 0.0 && k[0].is_finite())) {
                    return bad("knots", "values must be finite and non-negative".into());
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = match &self.shape {
            Shape::Box { lo, hi } => {
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *l <= *v && *v <= *h);
                if inside {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::TensorBump { center, half_width } => {
                let mut p = 1.0;
                for ((v, c), w) in x.iter().zip(center).zip(half_width) {
                    let s = (v - c) / w;
                    if s.abs() >= 1.0 {
                        return 0.0;
                    }
                    let u = 1.0 - s * s;
                    p *= u * u;
                }
                p
            }
            Shape::RadialPiecewise { center, scale, knots } => {
                let rho = x
                    .iter()
                    .zip(center.iter().zip(scale))
                    .map(|(v, (c, s))| ((v - c) / s).powi(2))
                    .sum::<f64>()
                    .sqrt();
                profile(knots, rho)
            }
        };
        self.amplitude * v
    }

    /// Closed box containing the support.
    pub fn support_box(&self) -> Vec<(f64, f64)> {
        match &self.shape {
            Shape::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| (*l, *h)).collect(),
            Shape::TensorBump { center, half_width } => {
                center.iter().zip(half_width).map(|(c, w)| (c - w, c + w)).collect()
            }
            Shape::RadialPiecewise { center, scale, knots } => {
                let r = knots.last().map(|k| k[0]).unwrap_or(0.0);
                center.iter().zip(scale).map(|(c, s)| (c - r * s, c + r * s)).collect()
            }
        }
    }

    /// Short identifier used in output files.
    pub fn id(&self) -> String {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(":");
        let base = match &self.shape {
            Shape::Box { lo, hi } => format!("box[{}|{}]", fmt(lo), fmt(hi)),
            Shape::TensorBump { center, half_width } => {
                format!("bump[{}|{}]", fmt(center), fmt(half_width))
            }
            Shape::RadialPiecewise { center, scale, .. } => {
                format!("radial[{}|{}]", fmt(center), fmt(scale))
            }
        };
        if self.amplitude == 1.0 {
            base
        } else {
            format!("{}*{base}", self.amplitude)
        }
    }
}

fn profile(knots: &[[f64; 2]], rho: f64) -> f64 {
    let last = knots[knots.len() - 1];
    if rho > last[0] {
        return 0.0;
    }
    if knots.len() == 1 {
        return last[1];
    }
    let i = knots.partition_point(|k| k[0] <= rho).clamp(1, knots.len() - 1);
    let [r0, v0] = knots[i - 1];
    let [r1, v1] = knots[i];
    v0 + (v1 - v0) * ((rho - r0) / (r1 - r0)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_evaluate() {
        let b = TestFunction::indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(b.eval(&[0.5, 1.0]), 1.0);
        assert_eq!(b.eval(&[0.5, 1.01]), 0.0);
        let t = TestFunction::bump(&[0.0], &[2.0]).unwrap();
        assert_eq!(t.eval(&[0.0]), 1.0);
        assert_eq!(t.eval(&[1.0]), 0.5625);
        assert_eq!(t.eval(&[2.0]), 0.0);
        let r = TestFunction::radial(&[0.0, 0.0], &[1.0, 1.0], &[[0.0, 1.0], [1.0, 1.0], [2.0, 0.0]]).unwrap();
        assert_eq!(r.eval(&[0.6, 0.8]), 1.0);
        assert!((r.eval(&[1.5, 0.0]) - 0.5).abs() < 1e-15);
        assert_eq!(r.eval(&[2.5, 0.0]), 0.0);
        assert_eq!(r.support_box(), vec![(-2.0, 2.0), (-2.0, 2.0)]);
        assert_eq!(b.clone().scaled(2.0).eval(&[0.5, 0.5]), 2.0);
        assert_eq!(b.translated(&[1.0, 0.0]).eval(&[1.5, 0.5]), 1.0);
    }

    #[test]
    fn validation_names_keys() {
        let err = TestFunction::indicator(&[0.0], &[0.0]).unwrap_err();
        assert!(err.to_string().contains("phi.hi"), "{err}");
        let err = TestFunction::radial(&[0.0], &[1.0], &[[0.5, 1.0]]).unwrap_err();
        assert!(err.to_string().contains("phi.knots"), "{err}");
    }

    #[test]
    fn parses_from_toml() {
        let f: TestFunction = toml::from_str("kind = \"tensor-bump\"\ncenter = [0.5]\nhalf_width = [0.25]\n").unwrap();
        assert_eq!(f, TestFunction::bump(&[0.5], &[0.25]).unwrap());
    }
}
