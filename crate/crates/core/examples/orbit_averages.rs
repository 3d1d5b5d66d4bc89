//! Normalized orbit averages `(1/V(t)) Σ_{γ∈Γ_t} φ(x·γ)` on an affine and a
//! de Sitter model, with the return counts that make the de Sitter case
//! sparse.
//!
//! `cargo run --release --example orbit_averages`

use orbitstat::sampling::{
    domain_restricted_affine_sum, orbit_sums, sample_points, NormalizationMode, OrbitAverageRequest, SumOptions,
};
use orbitstat::spaces::{Point, SpaceKind, SpaceModel, TestFunction};

fn main() -> orbitstat::Result<()> {
    // Solvable affine group: the average of 1_{[0,1]²} tends to 1.
    let model = SpaceModel::affine_solvable([[2, 1], [1, 1]])?;
    let phi = TestFunction::indicator(&[0.0, 0.0], &[1.0, 1.0])?;
    for t in [10.0, 30.0, 50.0] {
        let req = OrbitAverageRequest::new(model.clone(), Point::new(&[0.31, 0.77]), phi.clone(), t)
            .with_normalization(NormalizationMode::Volume);
        println!("solvable affine, t = {t}: {:.4}", domain_restricted_affine_sum(&req)?);
    }

    // De Sitter 2: few orbit points return to a fixed box.
    let model = SpaceModel::new(SpaceKind::DeSitter2);
    let points = sample_points(&model, &[(-0.5, 0.5), (0.0, std::f64::consts::TAU)], 3, 11)?;
    let phi = TestFunction::indicator(&[-1.0, 0.0], &[1.0, 6.3])?;
    let ts = [8.0, 10.0, 12.0, 14.0];
    let sums = orbit_sums(&model, &points, std::slice::from_ref(&phi), &ts, SumOptions::default())?;
    for (k, t) in ts.iter().enumerate() {
        let ball = sums.ball_counts[k].map_or("?".to_string(), |c| c.to_string());
        let returns: Vec<u64> = (0..points.len()).map(|p| sums.return_count(p, 0, k)).collect();
        println!("de Sitter 2, t = {t}: |Γ_t| = {ball}, returns {returns:?}");
    }
    Ok(())
}
