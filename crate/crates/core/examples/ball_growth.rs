//! Lattice ball counts and their exponential growth rates.
//!
//! `cargo run --release --example ball_growth`

use std::time::Instant;

use orbitstat::arith::{ball_counts, GroupSpec};
use orbitstat::stats::linear_slope;
use orbitstat::Height;

fn report(name: &str, spec: &GroupSpec, ts: &[f64]) -> orbitstat::Result<()> {
    let start = Instant::now();
    let heights: Vec<Height> = ts.iter().map(|&t| Height(t)).collect();
    let counts = ball_counts(spec, &heights)?;
    let logs: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let fit = linear_slope(ts, &logs)?;
    println!("{name}: slope {:.4} ({:.2?})", fit.coefficients[0], start.elapsed());
    for (t, c) in ts.iter().zip(&counts) {
        println!("  t = {t:<5} |ball| = {c}");
    }
    Ok(())
}

fn main() -> orbitstat::Result<()> {
    report("SL2(Z)", &GroupSpec::sl2z(), &[4.0, 4.5, 5.0, 5.5, 6.0, 6.5, 7.0])?;
    report("SL2(Z[i])", &GroupSpec::sl2_gauss(), &[2.5, 3.0, 3.5, 4.0, 4.5])?;
    report("sym2 SL2(Z)", &GroupSpec::sym_square(), &[8.0, 10.0, 12.0, 14.0, 16.0])?;
    report("spin SL2(Z[i])", &GroupSpec::spin(), &[4.0, 5.0, 6.0, 7.0, 8.0])?;
    Ok(())
}
