//! Gaussian integers ℤ[i] with checked arithmetic and the nearest-rounding
//! Euclidean algorithm.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize,
)]
pub struct GaussInt {
    pub re: i64,
    pub im: i64,
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (re, 0) => write!(f, "{re}"),
            (0, im) => write!(f, "{im}i"),
            (re, im) if im < 0 => write!(f, "{re}{im}i"),
            (re, im) => write!(f, "{re}+{im}i"),
        }
    }
}

fn narrow(v: i128) -> Result<i64> {
    i64::try_from(v).map_err(|_| Error::Overflow("gaussian integer arithmetic"))
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };
    pub const UNITS: [GaussInt; 4] = [
        GaussInt { re: 1, im: 0 },
        GaussInt { re: 0, im: 1 },
        GaussInt { re: -1, im: 0 },
        GaussInt { re: 0, im: -1 },
    ];

    pub const fn new(re: i64, im: i64) -> Self {
        Self { re, im }
    }

    pub const fn real(re: i64) -> Self {
        Self { re, im: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    /// `|z|²` as an exact 128-bit integer.
    #[inline]
    pub fn norm(self) -> i128 {
        let (a, b) = (self.re as i128, self.im as i128);
        a * a + b * b
    }

    pub fn conj(self) -> Self {
        Self {
            re: self.re,
            im: self.im.checked_neg().expect("i64::MIN imaginary part"),
        }
    }

    pub fn checked_neg(self) -> Result<Self> {
        Ok(Self {
            re: self.re.checked_neg().ok_or(Error::Overflow("negation"))?,
            im: self.im.checked_neg().ok_or(Error::Overflow("negation"))?,
        })
    }

    pub fn checked_add(self, o: Self) -> Result<Self> {
        Ok(Self {
            re: self.re.checked_add(o.re).ok_or(Error::Overflow("addition"))?,
            im: self.im.checked_add(o.im).ok_or(Error::Overflow("addition"))?,
        })
    }

    pub fn checked_sub(self, o: Self) -> Result<Self> {
        Ok(Self {
            re: self.re.checked_sub(o.re).ok_or(Error::Overflow("subtraction"))?,
            im: self.im.checked_sub(o.im).ok_or(Error::Overflow("subtraction"))?,
        })
    }

    /// Product computed in 128 bits and narrowed with a check.
    pub fn checked_mul(self, o: Self) -> Result<Self> {
        let (re, im) = self.mul_wide(o);
        Ok(Self {
            re: narrow(re)?,
            im: narrow(im)?,
        })
    }

    #[inline]
    pub fn mul_wide(self, o: Self) -> (i128, i128) {
        let (a, b, c, d) = (self.re as i128, self.im as i128, o.re as i128, o.im as i128);
        (a * c - b * d, a * d + b * c)
    }

    /// Inverse of a unit.
    pub fn unit_inverse(self) -> Option<Self> {
        self.is_unit().then(|| self.conj())
    }

    /// Quotient rounded to the nearest Gaussian integer, so that the
    /// remainder satisfies `N(r) ≤ N(d)/2`.
    pub fn div_nearest(self, d: Self) -> Result<Self> {
        if d.is_zero() {
            return Err(Error::domain("division by zero in ℤ[i]"));
        }
        let n = d.norm();
        let (p, q) = self.mul_wide(d.conj());
        let round = |x: i128| -> Result<i64> {
            let two_n = n.checked_mul(2).ok_or(Error::Overflow("rounding"))?;
            let num = x
                .checked_mul(2)
                .and_then(|v| v.checked_add(n))
                .ok_or(Error::Overflow("rounding"))?;
            narrow(num.div_euclid(two_n))
        };
        Ok(Self {
            re: round(p)?,
            im: round(q)?,
        })
    }

    pub fn rem_nearest(self, d: Self) -> Result<Self> {
        let q = self.div_nearest(d)?;
        self.checked_sub(q.checked_mul(d)?)
    }

    /// Exact division if `d` divides `self`.
    pub fn div_exact(self, d: Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        let n = d.norm();
        let (p, q) = self.mul_wide(d.conj());
        if p % n != 0 || q % n != 0 {
            return None;
        }
        Some(Self {
            re: i64::try_from(p / n).ok()?,
            im: i64::try_from(q / n).ok()?,
        })
    }

    pub fn to_f64(self) -> (f64, f64) {
        (self.re as f64, self.im as f64)
    }
}

/// Extended Euclidean algorithm in ℤ[i]: returns `(g, x, y)` with
/// `a·x + b·y = g` and `g` a greatest common divisor.
pub fn ext_gcd(a: GaussInt, b: GaussInt) -> Result<(GaussInt, GaussInt, GaussInt)> {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (GaussInt::ONE, GaussInt::ZERO);
    let (mut t0, mut t1) = (GaussInt::ZERO, GaussInt::ONE);
    while !r1.is_zero() {
        let q = r0.div_nearest(r1)?;
        let r2 = r0.checked_sub(q.checked_mul(r1)?)?;
        let s2 = s0.checked_sub(q.checked_mul(s1)?)?;
        let t2 = t0.checked_sub(q.checked_mul(t1)?)?;
        (r0, r1) = (r1, r2);
        (s0, s1) = (s1, s2);
        (t0, t1) = (t1, t2);
    }
    Ok((r0, s0, t0))
}

pub fn gcd(a: GaussInt, b: GaussInt) -> Result<GaussInt> {
    Ok(ext_gcd(a, b)?.0)
}

/// For a primitive pair `(a, c)` returns `(b, d)` with `a·d − b·c = 1`;
/// `None` if the pair is not primitive.
pub fn bezout_completion(a: GaussInt, c: GaussInt) -> Result<Option<(GaussInt, GaussInt)>> {
    let (g, x, y) = ext_gcd(a, c)?;
    let Some(u) = g.unit_inverse() else {
        return Ok(None);
    };
    let d = x.checked_mul(u)?;
    let b = y.checked_mul(u)?.checked_neg()?;
    Ok(Some((b, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gi(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    #[test]
    fn nearest_division_shrinks_remainder() {
        let a = gi(27, -13);
        let d = gi(4, 3);
        let r = a.rem_nearest(d).unwrap();
        assert!(2 * r.norm() <= d.norm());
        let q = a.div_nearest(d).unwrap();
        assert_eq!(q.checked_mul(d).unwrap().checked_add(r).unwrap(), a);
    }

    #[test]
    fn gcd_of_known_pairs() {
        // 5 = (2+i)(2-i); gcd(5, 2+i) is an associate of 2+i.
        let g = gcd(gi(5, 0), gi(2, 1)).unwrap();
        assert_eq!(g.norm(), 5);
        let g = gcd(gi(3, 0), gi(2, 1)).unwrap();
        assert!(g.is_unit());
        // 2 = -i(1+i)^2
        let g = gcd(gi(2, 0), gi(1, 1)).unwrap();
        assert_eq!(g.norm(), 2);
    }

    #[test]
    fn non_primitive_pair_has_no_completion() {
        assert!(bezout_completion(gi(2, 0), gi(1, 1)).unwrap().is_none());
        assert!(bezout_completion(gi(0, 0), gi(0, 0)).unwrap().is_none());
    }

    #[test]
    fn display() {
        assert_eq!(gi(3, -2).to_string(), "3-2i");
        assert_eq!(gi(0, 1).to_string(), "1i");
        assert_eq!(gi(-4, 0).to_string(), "-4");
    }

    #[test]
    fn overflow_is_reported() {
        let big = gi(i64::MAX, 1);
        assert!(matches!(big.checked_mul(big), Err(Error::Overflow(_))));
    }

    proptest! {
        #[test]
        fn bezout_completion_has_determinant_one(ar in -300i64..300, ai in -300i64..300,
                                                 cr in -300i64..300, ci in -300i64..300) {
            let (a, c) = (gi(ar, ai), gi(cr, ci));
            prop_assume!(!(a.is_zero() && c.is_zero()));
            let g = gcd(a, c).unwrap();
            // g divides both entries
            prop_assert!(a.div_exact(g).is_some() && c.div_exact(g).is_some());
            if let Some((b, d)) = bezout_completion(a, c).unwrap() {
                let det = a.checked_mul(d).unwrap().checked_sub(b.checked_mul(c).unwrap()).unwrap();
                prop_assert_eq!(det, GaussInt::ONE);
                prop_assert!(g.is_unit());
            } else {
                prop_assert!(!g.is_unit());
            }
        }
    }
}
