use std::fmt;

use serde::{Deserialize, Serialize};

use super::gaussian::GaussInt;
use crate::matrix::Mat2;
use crate::{Error, Result};

/// An exact element of one of the arithmetic groups: a determinant-one 2×2
/// matrix over ℤ or ℤ[i], optionally with an integer translation (affine
/// groups) and the exponent `n` when the linear part is a power `aⁿ` of the
/// cyclic generator.
///
/// The derived ordering is the canonical one: lexicographic on
/// `(a, b, c, d)` (real part before imaginary part), then translation, then
/// power.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub linear: [[GaussInt; 2]; 2],
    pub translation: Option<[i64; 2]>,
    pub power: Option<i64>,
}

impl GroupElement {
    pub fn identity() -> Self {
        Self::from_linear_unchecked([GaussInt::ONE, GaussInt::ZERO, GaussInt::ZERO, GaussInt::ONE])
    }

    /// Integer matrix `[[a, b], [c, d]]`; fails unless `ad − bc = 1`.
    pub fn sl2z(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::gaussian([a, b, c, d].map(GaussInt::real))
    }

    pub fn gaussian(entries: [GaussInt; 4]) -> Result<Self> {
        let g = Self::from_linear_unchecked(entries);
        if g.det()? != GaussInt::ONE {
            return Err(Error::domain(format!("determinant of {g} is not 1")));
        }
        Ok(g)
    }

    pub(crate) fn from_linear_unchecked(e: [GaussInt; 4]) -> Self {
        Self {
            linear: [[e[0], e[1]], [e[2], e[3]]],
            translation: None,
            power: None,
        }
    }

    pub(crate) fn from_sl2z_unchecked(e: [i64; 4]) -> Self {
        Self::from_linear_unchecked(e.map(GaussInt::real))
    }

    pub fn with_translation(mut self, v: [i64; 2]) -> Self {
        self.translation = Some(v);
        self
    }

    pub fn with_power(mut self, n: i64) -> Self {
        self.power = Some(n);
        self
    }

    pub fn entries(&self) -> [GaussInt; 4] {
        let [[a, b], [c, d]] = self.linear;
        [a, b, c, d]
    }

    /// Integer entries when the linear part is real.
    pub fn real_entries(&self) -> Option<[i64; 4]> {
        let e = self.entries();
        e.iter().all(|z| z.im == 0).then(|| e.map(|z| z.re))
    }

    pub fn is_real(&self) -> bool {
        self.real_entries().is_some()
    }

    pub fn det(&self) -> Result<GaussInt> {
        let [a, b, c, d] = self.entries();
        a.checked_mul(d)?.checked_sub(b.checked_mul(c)?)
    }

    /// Exact `Σ |entries|²` of the linear part.
    pub fn frobenius_sq(&self) -> u128 {
        self.entries().iter().map(|z| z.norm() as u128).sum()
    }

    pub fn translation_sq(&self) -> u128 {
        self.translation
            .map(|[x, y]| ((x as i128).pow(2) + (y as i128).pow(2)) as u128)
            .unwrap_or(0)
    }

    /// Group law in the row-vector convention: `x·(g·h) = (x·g)·h`, where an
    /// affine element acts by `x ↦ x·linear + translation`.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self> {
        let [a, b, c, d] = self.entries();
        let [e, f, g, h] = rhs.entries();
        let lin = [
            a.checked_mul(e)?.checked_add(b.checked_mul(g)?)?,
            a.checked_mul(f)?.checked_add(b.checked_mul(h)?)?,
            c.checked_mul(e)?.checked_add(d.checked_mul(g)?)?,
            c.checked_mul(f)?.checked_add(d.checked_mul(h)?)?,
        ];
        let mut out = Self::from_linear_unchecked(lin);
        out.translation = match (self.translation, rhs.translation) {
            (None, None) => None,
            (v1, v2) => {
                let [x, y] = v1.unwrap_or([0, 0]);
                let v2 = v2.unwrap_or([0, 0]);
                let Some([e, f, g, h]) = rhs.real_entries() else {
                    return Err(Error::domain("affine composition needs real linear parts"));
                };
                let mul = |p: i64, q: i64| p.checked_mul(q).ok_or(Error::Overflow("affine product"));
                let add = |p: i64, q: i64| p.checked_add(q).ok_or(Error::Overflow("affine product"));
                Some([
                    add(add(mul(x, e)?, mul(y, g)?)?, v2[0])?,
                    add(add(mul(x, f)?, mul(y, h)?)?, v2[1])?,
                ])
            }
        };
        out.power = match (self.power, rhs.power) {
            (None, None) => None,
            (p, q) => Some(
                p.unwrap_or(0)
                    .checked_add(q.unwrap_or(0))
                    .ok_or(Error::Overflow("power"))?,
            ),
        };
        Ok(out)
    }

    /// Inverse via the adjugate (determinant one).
    pub fn inverse(&self) -> Result<Self> {
        let [a, b, c, d] = self.entries();
        let mut out =
            Self::from_linear_unchecked([d, b.checked_neg()?, c.checked_neg()?, a]);
        if let Some([x, y]) = self.translation {
            // (h, v)⁻¹ = (h⁻¹, −v·h⁻¹)
            let Some([e, f, g, h]) = out.real_entries() else {
                return Err(Error::domain("affine inverse needs a real linear part"));
            };
            let dot = |p: i64, q: i64, r: i64, s: i64| -> Result<i64> {
                let v = (p as i128) * (q as i128) + (r as i128) * (s as i128);
                i64::try_from(-v).map_err(|_| Error::Overflow("affine inverse"))
            };
            out.translation = Some([dot(x, e, y, g)?, dot(x, f, y, h)?]);
        }
        out.power = self.power.map(|n| -n);
        Ok(out)
    }

    /// Conjugate transpose of the linear part (translation and power dropped).
    pub fn conj_transpose(&self) -> Self {
        let [a, b, c, d] = self.entries();
        Self::from_linear_unchecked([a.conj(), c.conj(), b.conj(), d.conj()])
    }

    pub fn to_mat2(&self) -> Option<Mat2> {
        self.real_entries()
            .map(|[a, b, c, d]| Mat2::from_entries(&[a as f64, b as f64, c as f64, d as f64]))
    }

    /// Decimal integers in canonical order: re/im of a, b, c, d, then the
    /// translation and power when present.
    pub fn canonical_integers(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.entries().iter().flat_map(|z| [z.re, z.im]).collect();
        if let Some(v) = self.translation {
            out.extend(v);
        }
        if let Some(n) = self.power {
            out.push(n);
        }
        out
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.entries();
        write!(f, "[[{a}, {b}], [{c}, {d}]]")?;
        if let Some([x, y]) = self.translation {
            write!(f, " + ({x}, {y})")?;
        }
        if let Some(n) = self.power {
            write!(f, " (n = {n})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_is_enforced() {
        assert!(GroupElement::sl2z(2, 1, 1, 1).is_ok());
        assert!(GroupElement::sl2z(2, 1, 1, 2).is_err());
        let i = GaussInt::I;
        let minus_i = GaussInt::new(0, -1);
        assert!(GroupElement::gaussian([i, GaussInt::ZERO, GaussInt::ZERO, minus_i]).is_ok());
    }

    #[test]
    fn affine_law_matches_composition_of_maps() {
        let g = GroupElement::sl2z(1, 1, 0, 1).unwrap().with_translation([2, -1]);
        let h = GroupElement::sl2z(2, 1, 1, 1).unwrap().with_translation([0, 3]);
        let gh = g.checked_mul(&h).unwrap();
        let act = |e: &GroupElement, x: [i64; 2]| {
            let [a, b, c, d] = e.real_entries().unwrap();
            let v = e.translation.unwrap();
            [x[0] * a + x[1] * c + v[0], x[0] * b + x[1] * d + v[1]]
        };
        let x = [5, -7];
        assert_eq!(act(&gh, x), act(&h, act(&g, x)));
        let inv = gh.inverse().unwrap();
        assert_eq!(gh.checked_mul(&inv).unwrap(), GroupElement::identity().with_translation([0, 0]));
    }

    #[test]
    fn canonical_order_is_lexicographic() {
        let mut v = vec![
            GroupElement::sl2z(1, 0, 0, 1).unwrap(),
            GroupElement::sl2z(-1, 0, 0, -1).unwrap(),
            GroupElement::sl2z(0, 1, -1, 0).unwrap(),
            GroupElement::sl2z(0, -1, 1, 0).unwrap(),
        ];
        v.sort();
        let firsts: Vec<i64> = v.iter().map(|g| g.canonical_integers()[0]).collect();
        assert_eq!(firsts, vec![-1, 0, 0, 1]);
        assert_eq!(v[1].canonical_integers()[2], -1);
    }
}
