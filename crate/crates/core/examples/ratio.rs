//! Ratio averages `Σφ(x·γ) / Σψ(x·γ)`, where every normalization cancels,
//! compared with the ratio of reference-measure integrals.
//!
//! `cargo run --release --example ratio`

use orbitstat::sampling::ratio_average;
use orbitstat::spaces::{SpaceKind, SpaceModel, TestFunction};

fn main() -> orbitstat::Result<()> {
    let model = SpaceModel::new(SpaceKind::DeSitter2);
    let phi = TestFunction::indicator(&[-4.0, 0.0], &[0.0, 6.3])?;
    let psi = TestFunction::indicator(&[0.5, 0.0], &[4.0, 6.3])?;
    let expected = model.chart_integral(&phi, |_| 1.0, 16)? / model.chart_integral(&psi, |_| 1.0, 16)?;
    let x = model.from_chart(&[0.2, 1.0])?;
    for t in [10.0, 12.0, 14.0] {
        println!("t = {t}: ratio {:.4} (limit {expected:.4})", ratio_average(&model, &x, &phi, &psi, t)?);
    }
    Ok(())
}
