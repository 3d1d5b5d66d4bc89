//! A convergence report: orbit averages on a height grid with the limit and
//! the better of a power and an exponential rate fit, next to the
//! continuous comparison value.
//!
//! `cargo run --release --example convergence`

use orbitstat::sampling::{continuous_comparison, convergence_report, NormalizationMode, SumOptions};
use orbitstat::spaces::{SpaceKind, SpaceModel, TestFunction};

fn main() -> orbitstat::Result<()> {
    let model = SpaceModel::new(SpaceKind::ProjectiveLine);
    let x = model.from_chart(&[0.3])?;
    let phi = TestFunction::bump(&[1.0], &[0.2])?;
    let grid: Vec<f64> = (0..8).map(|k| 4.0 + 0.5 * k as f64).collect();
    let report = convergence_report(&model, &x, &phi, &grid, NormalizationMode::Model, SumOptions::default())?;
    for ((t, v), (_, r)) in report.grid.iter().zip(&report.return_counts) {
        println!("t = {t:<4} average {v:.5} ({r} returns)");
    }
    println!(
        "limit {:.5}, rate {} with parameter {:.3} (alternative {} residual {:.2e})",
        report.fitted_limit,
        report.rate.model.name(),
        report.rate.parameter,
        report.alternative.model.name(),
        report.alternative.residual
    );
    let c = continuous_comparison(&model, &x, &phi, 7.5, 8)?;
    println!("predicted integral up to the model constant: {:.5}", c.value);
    Ok(())
}
