//! The low-dimensional isogenies SL₂(ℝ) → SO(2,1) and SL₂(ℂ) → SO(3,1).

use super::element::GroupElement;
use super::gaussian::GaussInt;
use crate::matrix::{Mat3, Mat4};
use crate::{Error, Result};

/// Row-action matrix of `γ` on binary quadratic forms `αu² + βuw + δw²`
/// under the substitution `(u, w) ↦ (au + bw, cu + dw)`.
///
/// Forms are row vectors `(α, β, δ)` and act by `q ↦ q·M`, so
/// `sym_square(γ₁γ₂) = sym_square(γ₁)·sym_square(γ₂)`. The discriminant
/// `β² − 4αδ` is preserved.
pub fn sym_square(g: &GroupElement) -> Result<[[i128; 3]; 3]> {
    let Some([a, b, c, d]) = g.real_entries() else {
        return Err(Error::domain("sym_square needs an integer matrix"));
    };
    let (a, b, c, d) = (a as i128, b as i128, c as i128, d as i128);
    let ovf = |x: Option<i128>| x.ok_or(Error::Overflow("sym_square"));
    let m = |x: i128, y: i128| ovf(x.checked_mul(y));
    Ok([
        [m(a, a)?, m(2 * a, b)?, m(b, b)?],
        [m(a, c)?, ovf(m(a, d)?.checked_add(m(b, c)?))?, m(b, d)?],
        [m(c, c)?, m(2 * c, d)?, m(d, d)?],
    ])
}

/// Discriminant form `β² − 4αδ`.
pub fn discriminant(q: [i128; 3]) -> i128 {
    q[1] * q[1] - 4 * q[0] * q[2]
}

/// Orthonormal coordinates `x = (α − δ, β, α + δ)`, in which the
/// discriminant is `x₁² + x₂² − x₃²`.
pub fn form_to_orthonormal(q: [f64; 3]) -> [f64; 3] {
    [q[0] - q[2], q[1], q[0] + q[2]]
}

pub fn orthonormal_to_form(x: [f64; 3]) -> [f64; 3] {
    [0.5 * (x[0] + x[2]), x[1], 0.5 * (x[2] - x[0])]
}

/// `sym_square(γ)` in orthonormal coordinates: `Λ = P⁻¹·M·P` for the change
/// of basis `x = q·P`. Entries are half-integers, exact in `f64` for the
/// ball sizes in use. `‖Λ‖² = S² − 1` with `S` the Frobenius square of `γ`.
pub fn sym_square_orthonormal(g: &GroupElement) -> Result<Mat3> {
    let m = sym_square(g)?;
    let p = Mat3::from_entries(&[1.0, 0.0, 1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0]);
    let p_inv = Mat3::from_entries(&[0.5, 0.0, -0.5, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5]);
    let mut mf = Mat3::zero();
    for i in 0..3 {
        for j in 0..3 {
            mf.0[i][j] = m[i][j] as f64;
        }
    }
    Ok(p_inv * mf * p)
}

fn hermitian(x: [f64; 4]) -> [[(f64, f64); 2]; 2] {
    [
        [(x[0] + x[3], 0.0), (x[1], x[2])],
        [(x[1], -x[2]), (x[0] - x[3], 0.0)],
    ]
}

fn cmul(p: (f64, f64), q: (f64, f64)) -> (f64, f64) {
    (p.0 * q.0 - p.1 * q.1, p.0 * q.1 + p.1 * q.0)
}

fn cadd(p: (f64, f64), q: (f64, f64)) -> (f64, f64) {
    (p.0 + q.0, p.1 + q.1)
}

/// Coordinates of `γHγ*` for `H = [[x₀+x₃, x₁+ix₂], [x₁−ix₂, x₀−x₃]]`.
///
/// This is a left action; it preserves `x₁² + x₂² + x₃² − x₀² = −det H`.
pub fn spin_action(g: &GroupElement, x: [f64; 4]) -> [f64; 4] {
    let e = g.entries().map(|z| z.to_f64());
    let gm = [[e[0], e[1]], [e[2], e[3]]];
    let h = hermitian(x);
    // γH
    let mut gh = [[(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            gh[i][j] = cadd(cmul(gm[i][0], h[0][j]), cmul(gm[i][1], h[1][j]));
        }
    }
    // (γH)γ*, with (γ*)_{kj} = conj(γ_{jk}).
    let conj = |p: (f64, f64)| (p.0, -p.1);
    let mut out = [[(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = cadd(cmul(gh[i][0], conj(gm[j][0])), cmul(gh[i][1], conj(gm[j][1])));
        }
    }
    let (h11, h22, h12) = (out[0][0].0, out[1][1].0, out[0][1]);
    [0.5 * (h11 + h22), h12.0, h12.1, 0.5 * (h11 - h22)]
}

/// Exact version of [`spin_action`] on the Hermitian matrix
/// `[[h11, h12], [conj h12, h22]]` with Gaussian-integer entries.
pub fn spin_action_hermitian(
    g: &GroupElement,
    h11: i64,
    h12: GaussInt,
    h22: i64,
) -> Result<(i64, GaussInt, i64)> {
    let [a, b, c, d] = g.entries();
    let h = [[GaussInt::real(h11), h12], [h12.conj(), GaussInt::real(h22)]];
    let gm = [[a, b], [c, d]];
    let mut gh = [[GaussInt::ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            gh[i][j] = gm[i][0].checked_mul(h[0][j])?.checked_add(gm[i][1].checked_mul(h[1][j])?)?;
        }
    }
    let entry = |i: usize, j: usize| -> Result<GaussInt> {
        gh[i][0]
            .checked_mul(gm[j][0].conj())?
            .checked_add(gh[i][1].checked_mul(gm[j][1].conj())?)
    };
    let (o11, o12, o22) = (entry(0, 0)?, entry(0, 1)?, entry(1, 1)?);
    debug_assert!(o11.im == 0 && o22.im == 0);
    Ok((o11.re, o12, o22.re))
}

/// The 4×4 matrix `S(γ)` with `spin_action(γ, x) = S(γ)·x` (column vectors);
/// `S(γ₁γ₂) = S(γ₁)·S(γ₂)` and `‖S(γ)‖² = (Σ|γ_ij|²)²`.
pub fn spin_matrix(g: &GroupElement) -> Mat4 {
    let mut m = Mat4::zero();
    for j in 0..4 {
        let mut e = [0.0; 4];
        e[j] = 1.0;
        let col = spin_action(g, e);
        for i in 0..4 {
            m.0[i][j] = col[i];
        }
    }
    m
}

/// `x₁² + x₂² + x₃² − x₀²` in spin coordinates.
pub fn spin_form(x: [f64; 4]) -> f64 {
    x[1] * x[1] + x[2] * x[2] + x[3] * x[3] - x[0] * x[0]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sl2z(a: i64, b: i64, c: i64, d: i64) -> GroupElement {
        GroupElement::sl2z(a, b, c, d).unwrap()
    }

    fn act(m: &[[i128; 3]; 3], q: [i128; 3]) -> [i128; 3] {
        let mut out = [0; 3];
        for j in 0..3 {
            out[j] = (0..3).map(|i| q[i] * m[i][j]).sum();
        }
        out
    }

    fn mat_mul3(x: &[[i128; 3]; 3], y: &[[i128; 3]; 3]) -> [[i128; 3]; 3] {
        let mut out = [[0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (0..3).map(|k| x[i][k] * y[k][j]).sum();
            }
        }
        out
    }

    #[test]
    fn sym_square_examples() {
        assert_eq!(
            sym_square(&GroupElement::identity()).unwrap(),
            [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
        );
        let m = sym_square(&sl2z(1, 1, 0, 1)).unwrap();
        let (al, be, de) = (3, -5, 7);
        assert_eq!(act(&m, [al, be, de]), [al, 2 * al + be, al + be + de]);
        let q = [1, 0, -1];
        assert_eq!(discriminant(q), 4);
        assert_eq!(discriminant(act(&sym_square(&sl2z(2, 1, 1, 1)).unwrap(), q)), 4);
    }

    #[test]
    fn sym_square_is_the_substitution() {
        // Evaluate q∘γ at a few points directly.
        let g = sl2z(3, 2, 4, 3);
        let q = [2i128, -1, 5];
        let image = act(&sym_square(&g).unwrap(), q);
        for (u, w) in [(1i128, 0i128), (0, 1), (2, -3), (5, 7)] {
            let (u2, w2) = (3 * u + 2 * w, 4 * u + 3 * w);
            let lhs = q[0] * u2 * u2 + q[1] * u2 * w2 + q[2] * w2 * w2;
            let rhs = image[0] * u * u + image[1] * u * w + image[2] * w * w;
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn spin_examples() {
        let x = [0.3, -1.2, 0.7, 2.5];
        let y = spin_action(&GroupElement::identity(), x);
        assert!(y.iter().zip(x).all(|(p, q)| (p - q).abs() < 1e-15));
        assert_eq!(spin_action(&sl2z(1, 1, 0, 1), [0.0, 1.0, 0.0, 0.0]), [1.0, 1.0, 0.0, 1.0]);
    }

    fn gauss_element() -> impl Strategy<Value = GroupElement> {
        (-6i64..6, -6i64..6, -6i64..6, -6i64..6, -3i64..3, -3i64..3).prop_filter_map(
            "primitive column",
            |(ar, ai, cr, ci, kr, ki)| {
                let a = GaussInt::new(ar, ai);
                let c = GaussInt::new(cr, ci);
                let (b, d) = crate::arith::gaussian::bezout_completion(a, c).ok()??;
                let k = GaussInt::new(kr, ki);
                let b = b.checked_add(k.checked_mul(a).ok()?).ok()?;
                let d = d.checked_add(k.checked_mul(c).ok()?).ok()?;
                GroupElement::gaussian([a, b, c, d]).ok()
            },
        )
    }

    fn sl2z_element() -> impl Strategy<Value = GroupElement> {
        (-9i64..9, -9i64..9, -4i64..4).prop_filter_map("primitive column", |(a, c, k)| {
            let (b, d) = crate::arith::bezout_completion(a, c).ok()?;
            GroupElement::sl2z(a, b + k * a, c, d + k * c).ok()
        })
    }

    proptest! {
        #[test]
        fn sym_square_homomorphism(g in sl2z_element(), h in sl2z_element()) {
            let gh = g.checked_mul(&h).unwrap();
            let lhs = sym_square(&gh).unwrap();
            let rhs = mat_mul3(&sym_square(&g).unwrap(), &sym_square(&h).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn sym_square_orthonormal_norm(g in sl2z_element()) {
            let s = g.frobenius_sq() as f64;
            let l = sym_square_orthonormal(&g).unwrap();
            prop_assert_eq!(l.frobenius_sq(), s * s - 1.0);
        }

        #[test]
        fn spin_homomorphism(g in gauss_element(), h in gauss_element()) {
            let gh = g.checked_mul(&h).unwrap();
            let lhs = spin_matrix(&gh);
            let rhs = spin_matrix(&g) * spin_matrix(&h);
            prop_assert_eq!(lhs, rhs);
            let s = g.frobenius_sq() as f64;
            prop_assert_eq!(spin_matrix(&g).frobenius_sq(), s * s);
        }

        #[test]
        fn spin_preserves_form(g in gauss_element(), x in proptest::array::uniform4(-3.0f64..3.0)) {
            let y = spin_action(&g, x);
            let q = spin_form(x);
            prop_assert!((spin_form(y) - q).abs() <= 1e-10 * (1.0 + q.abs()) * (1.0 + g.frobenius_sq() as f64).powi(2));
        }

        #[test]
        fn spin_exact_determinant(g in gauss_element(), h11 in -20i64..20, h22 in -20i64..20,
                                  re in -20i64..20, im in -20i64..20) {
            let h12 = GaussInt::new(re, im);
            let det = h11 as i128 * h22 as i128 - h12.norm();
            let (o11, o12, o22) = spin_action_hermitian(&g, h11, h12, h22).unwrap();
            prop_assert_eq!(o11 as i128 * o22 as i128 - o12.norm(), det);
        }
    }
}
