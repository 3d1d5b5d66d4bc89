use approx::assert_relative_eq;
use proptest::prelude::*;

use orbitstat::arith::{ball_count, ball_counts, GroupSpec};
use orbitstat::sampling::{
    domain_restricted_affine_sum, orbit_sums, ratio_from_sums, NormalizationMode, OrbitAverageRequest, SumOptions,
};
use orbitstat::spaces::{Point, SpaceKind, SpaceModel, TestFunction};
use orbitstat::volumes::{de_sitter_section, theta_estimate, StabilizerModel};
use orbitstat::Height;

/// `#{γ ∈ SL₂(ℤ) : ‖γ‖² ≤ n}` by scanning the cube.
fn brute_sl2z(n: i64) -> u128 {
    let r = (n as f64).sqrt() as i64;
    let mut count = 0;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    if a * d - b * c == 1 && a * a + b * b + c * c + d * d <= n {
                        count += 1;
                    }
                }
            }
        }
    }
    count
}

#[test]
fn sl2z_counts_match_a_cube_scan() {
    for t in [1.0f64, 1.5, 2.0, 2.3] {
        let n = (2.0 * t).exp().floor() as i64;
        assert_eq!(ball_count(&GroupSpec::sl2z(), Height(t)).unwrap(), brute_sl2z(n), "t = {t}");
    }
    assert_eq!(ball_count(&GroupSpec::sl2z(), Height(2.0)).unwrap(), 324);
}

#[test]
fn counts_are_monotone_and_consistent() {
    let ts: Vec<Height> = [2.0, 2.5, 3.0].map(Height).to_vec();
    for spec in [GroupSpec::sl2z(), GroupSpec::sl2_gauss(), GroupSpec::affine()] {
        let joint = ball_counts(&spec, &ts).unwrap();
        assert!(joint.windows(2).all(|w| w[0] <= w[1]));
        for (t, c) in ts.iter().zip(&joint) {
            assert_eq!(ball_count(&spec, *t).unwrap(), *c);
        }
    }
}

#[test]
fn theta_matches_the_hyperbolic_cosine_kernel() {
    let model = StabilizerModel::so12();
    let g1 = de_sitter_section(4, 1.0).unwrap();
    let g0 = de_sitter_section(4, 0.0).unwrap();
    let est = theta_estimate(&model, &g1, &g0, 12.0).unwrap();
    assert_relative_eq!(est.value, 0.648054, max_relative = 0.02);
    assert!(est.stabilized);
}

#[test]
fn de_sitter_reference_integrals_have_closed_forms() {
    let model = SpaceModel::new(SpaceKind::DeSitter2);
    let phi = TestFunction::indicator(&[-4.0, 0.0], &[0.0, 6.3]).unwrap();
    let psi = TestFunction::indicator(&[0.5, 0.0], &[4.0, 6.3]).unwrap();
    let i = |f: &TestFunction| model.chart_integral(f, |_| 1.0, 16).unwrap();
    // dξ = cosh r dr dφ / 2π
    let scale = 6.3 / std::f64::consts::TAU;
    assert_relative_eq!(i(&phi), 4f64.sinh() * scale, max_relative = 1e-10);
    assert_relative_eq!(i(&psi), (4f64.sinh() - 0.5f64.sinh()) * scale, max_relative = 1e-10);
}

#[test]
fn solvable_affine_average_tends_to_one() {
    let model = SpaceModel::affine_solvable([[2, 1], [1, 1]]).unwrap();
    let phi = TestFunction::indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
    let req = OrbitAverageRequest::new(model, Point::new(&[0.31, 0.77]), phi, 50.0)
        .with_normalization(NormalizationMode::Volume);
    let avg = domain_restricted_affine_sum(&req).unwrap();
    assert!((avg - 1.0).abs() < 0.05, "{avg}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn orbit_sums_are_cumulative_in_t(theta in 0.0f64..3.14, c in 0.2f64..2.9) {
        let model = SpaceModel::new(SpaceKind::ProjectiveLine);
        let x = model.from_chart(&[theta]).unwrap();
        let phi = TestFunction::bump(&[c], &[0.2]).unwrap();
        let s = orbit_sums(&model, &[x], &[phi], &[2.0, 2.5, 3.0, 3.5], SumOptions::default()).unwrap();
        for k in 1..4 {
            prop_assert!(s.raw_sum(0, 0, k) >= s.raw_sum(0, 0, k - 1));
            prop_assert!(s.return_count(0, 0, k) >= s.return_count(0, 0, k - 1));
        }
    }

    #[test]
    fn ratios_cancel_common_scalings(theta in 0.0f64..3.14, scale in 0.1f64..10.0) {
        let model = SpaceModel::new(SpaceKind::ProjectiveLine);
        let x = model.from_chart(&[theta]).unwrap();
        let phi = TestFunction::bump(&[0.7], &[0.3]).unwrap();
        let psi = TestFunction::bump(&[2.0], &[0.3]).unwrap();
        let plain = orbit_sums(&model, &[x], &[phi.clone(), psi.clone()], &[3.0], SumOptions::default()).unwrap();
        let scaled = orbit_sums(&model, &[x], &[phi.scaled(scale), psi.scaled(scale)], &[3.0], SumOptions::default()).unwrap();
        let a = ratio_from_sums(&plain, 0, 0, 1, 0).unwrap();
        let b = ratio_from_sums(&scaled, 0, 0, 1, 0).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
    }
}
