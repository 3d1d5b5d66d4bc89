//! Haar volumes of stabilizer balls and their growth fits `e^{at} tᵇ`.
//!
//! `cargo run --release --example haar_volumes`

use orbitstat::volumes::{fit_growth, haar_ball_volume, write_volume_csv, StabilizerModel};

fn main() -> orbitstat::Result<()> {
    let models = [
        StabilizerModel::so11(2)?,
        StabilizerModel::so12(),
        StabilizerModel::sl2r(2)?.with_seed(7).with_mc_samples(1 << 16),
    ];
    for model in &models {
        let ts: Vec<f64> = (0..15).map(|k| 5.0 + 0.5 * k as f64).collect();
        let samples = ts.iter().map(|&t| haar_ball_volume(model, t)).collect::<orbitstat::Result<Vec<_>>>()?;
        let fit = fit_growth(&samples)?;
        println!(
            "{}: a = {:.4}, b = {} (residuals {:.2e} / {:.2e}), expected {:?}",
            model.gauge_id(),
            fit.a_hat,
            fit.b_hat,
            fit.residuals[0],
            fit.residuals[1],
            model.expected_growth()
        );
        write_volume_csv(std::io::stdout().lock(), &samples[..3])?;
    }
    Ok(())
}
