//! Exhaustive scans over entry tuples, independent of column completion.

use super::element::GroupElement;
use super::gaussian::GaussInt;
use super::spec::{Family, GroupSpec};
use crate::gauge::{isqrt, BallBound, Height};
use crate::{Error, Result};

/// Largest `e^t` accepted by the oracle.
pub const ORACLE_MAX_RADIUS: f64 = 16.0;

/// Every element of `Γ_t`, by exhaustive scan, sorted canonically.
///
/// Linear entries are scanned over `|re|, |im| ≤ E` with `E` the entry bound
/// of the family's ball. For SL₂(ℤ[i]) with `E > 3` the eighth coordinate is
/// solved instead of scanned: `d = (1 + bc)/a` when `a ≠ 0`, and when
/// `a = 0` the determinant forces `b` to be a unit and `d` is scanned.
pub fn brute_force_oracle(spec: &GroupSpec, t: Height) -> Result<Vec<GroupElement>> {
    if t.0.exp() > ORACLE_MAX_RADIUS + 1e-9 {
        return Err(Error::Refused(format!(
            "oracle needs e^t ≤ {ORACLE_MAX_RADIUS}, got t = {}",
            t.0
        )));
    }
    let ball = BallBound::new(t)?;
    let lin_max = spec.linear_bound(&ball);
    let mut out = Vec::new();
    match spec.family {
        Family::CyclicSolvable => {
            let (lo, hi) = spec.generator()?.power_range(t.0);
            let r = isqrt(ball.max_sq) as i64;
            for n in lo..=hi {
                let lin = spec.generator()?.power(n)?.with_power(n);
                for x in -r..=r {
                    for y in -r..=r {
                        let g = lin.clone().with_translation([x, y]);
                        if spec.contains(&g, &ball)? {
                            out.push(g);
                        }
                    }
                }
            }
        }
        Family::Sl2Gauss | Family::Sl2GaussSpin => {
            let e = isqrt(lin_max) as i64;
            let mut push = |g: GroupElement| -> Result<()> {
                if spec.contains(&g, &ball)? {
                    out.push(g);
                }
                Ok(())
            };
            if e <= 3 {
                gauss_full_scan(e, &mut push)?;
            } else {
                gauss_solved_scan(e, lin_max, &mut push)?;
            }
        }
        Family::Sl2z | Family::Sl2zSymSquare | Family::Sl2zAffine => {
            let e = isqrt(lin_max) as i64;
            let r = isqrt(ball.max_sq) as i64;
            for a in -e..=e {
                for b in -e..=e {
                    for c in -e..=e {
                        for d in -e..=e {
                            if a as i128 * d as i128 - b as i128 * c as i128 != 1 {
                                continue;
                            }
                            let g = GroupElement::from_sl2z_unchecked([a, b, c, d]);
                            if spec.family == Family::Sl2zAffine {
                                for x in -r..=r {
                                    for y in -r..=r {
                                        let ga = g.clone().with_translation([x, y]);
                                        if spec.contains(&ga, &ball)? {
                                            out.push(ga);
                                        }
                                    }
                                }
                            } else if spec.contains(&g, &ball)? {
                                out.push(g);
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn box_points(e: i64) -> Vec<GaussInt> {
    let mut v = Vec::with_capacity(((2 * e + 1) * (2 * e + 1)) as usize);
    for re in -e..=e {
        for im in -e..=e {
            v.push(GaussInt::new(re, im));
        }
    }
    v
}

fn gauss_full_scan(e: i64, push: &mut dyn FnMut(GroupElement) -> Result<()>) -> Result<()> {
    let pts = box_points(e);
    for &a in &pts {
        for &b in &pts {
            for &c in &pts {
                for &d in &pts {
                    let det = a.checked_mul(d)?.checked_sub(b.checked_mul(c)?)?;
                    if det == GaussInt::ONE {
                        push(GroupElement::from_linear_unchecked([a, b, c, d]))?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn gauss_solved_scan(
    e: i64,
    lin_max: u128,
    push: &mut dyn FnMut(GroupElement) -> Result<()>,
) -> Result<()> {
    let pts = box_points(e);
    let lin_max = lin_max as i128;
    for &a in &pts {
        for &b in &pts {
            if a.norm() + b.norm() > lin_max {
                continue;
            }
            for &c in &pts {
                if a.norm() + b.norm() + c.norm() > lin_max {
                    continue;
                }
                if a.is_zero() {
                    // −bc = 1.
                    if b.checked_mul(c)? != GaussInt::new(-1, 0) {
                        continue;
                    }
                    for &d in &pts {
                        push(GroupElement::from_linear_unchecked([a, b, c, d]))?;
                    }
                } else {
                    let num = GaussInt::ONE.checked_add(b.checked_mul(c)?)?;
                    if let Some(d) = num.div_exact(a) {
                        if d.re.abs() <= e && d.im.abs() <= e {
                            push(GroupElement::from_linear_unchecked([a, b, c, d]))?;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::enumerate::enumerate_ball;

    #[test]
    fn refuses_large_t() {
        assert!(matches!(
            brute_force_oracle(&GroupSpec::sl2z(), Height(3.0)),
            Err(Error::Refused(_))
        ));
    }

    #[test]
    fn gaussian_scans_agree() {
        // e^t = 3 runs the full eight-coordinate scan; compare it with the
        // solved scan at the same bound.
        let t = Height(3f64.ln());
        let full = brute_force_oracle(&GroupSpec::sl2_gauss(), t).unwrap();
        let mut solved = Vec::new();
        let lin_max = BallBound::new(t).unwrap().max_sq;
        gauss_solved_scan(3, lin_max, &mut |g| {
            if g.frobenius_sq() <= lin_max {
                solved.push(g);
            }
            Ok(())
        })
        .unwrap();
        solved.sort_unstable();
        assert_eq!(full, solved);
    }

    #[test]
    fn small_families_match_enumeration() {
        let cases = [
            (GroupSpec::sl2z(), 0.5 * 2f64.ln()),
            (GroupSpec::sl2z(), 8f64.ln()),
            (GroupSpec::sl2_gauss(), 0.5 * 5f64.ln()),
            (GroupSpec::sym_square(), 2.0),
            (GroupSpec::spin(), 1.5),
            (GroupSpec::affine(), 1.2),
            (GroupSpec::cyclic_solvable([[2, 1], [1, 1]]).unwrap(), 1.9),
        ];
        for (spec, t) in cases {
            let oracle = brute_force_oracle(&spec, Height(t)).unwrap();
            let enumerated = enumerate_ball(&spec, Height(t)).unwrap().elements;
            assert_eq!(oracle, enumerated, "{:?} at t = {t}", spec.family);
        }
    }
}
