//! Exact arithmetic groups and complete, duplicate-free ball enumeration.
//!
//! Every SL₂ element is reached exactly once through its first column: a
//! primitive pair `(a, c)` is completed by one Bézout solution `(b₀, d₀)`,
//! and the remaining solutions form the progression `(b₀ + ka, d₀ + kc)`.
//! With `n = |a|² + |c|²` and `m = ā·b₀ + c̄·d₀` the Lagrange identity gives
//! `n·(|b|² + |d|²) = |nk + m|² + 1`, so the admissible `k` are the integer
//! points of an interval (over ℤ) or a disk (over ℤ[i]).

pub mod dump;
pub mod element;
pub mod embed;
pub mod enumerate;
pub mod gaussian;
pub mod oracle;
pub mod spec;

pub use element::GroupElement;
pub use enumerate::{ball_count, ball_counts, enumerate_ball, Ball, BallEnumeration};
pub use gaussian::GaussInt;
pub use spec::{CyclicGenerator, Family, GroupSpec};

use crate::{Error, Result};

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

/// Extended Euclid over ℤ: `(g, x, y)` with `a·x + b·y = g ≥ 0`.
pub fn ext_gcd_i64(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (r0, s0, t0) = (-r0, -s0, -t0);
    }
    // |s0| ≤ |b| and |t0| ≤ |a| by the standard Euclid bounds.
    (r0 as i64, s0 as i64, t0 as i64)
}

/// For a primitive integer column `(a, c)` returns `(b, d)` with `ad − bc = 1`.
pub fn bezout_completion(a: i64, c: i64) -> Result<(i64, i64)> {
    let (g, x, y) = ext_gcd_i64(a, c);
    if g != 1 {
        return Err(Error::domain(format!("column ({a}, {c}) is not primitive")));
    }
    Ok((-y, x))
}
