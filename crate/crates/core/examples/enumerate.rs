//! Exact ball enumeration checked against the brute-force oracle, and a text
//! dump of the result.
//!
//! `cargo run --release --example enumerate`

use std::collections::BTreeSet;

use orbitstat::arith::dump::write_ball;
use orbitstat::arith::oracle::brute_force_oracle;
use orbitstat::arith::{ball_count, enumerate_ball, GroupSpec};
use orbitstat::Height;

fn main() -> orbitstat::Result<()> {
    for (name, spec) in [("SL2(Z)", GroupSpec::sl2z()), ("SL2(Z[i])", GroupSpec::sl2_gauss())] {
        let t = Height(6f64.ln());
        let ball = enumerate_ball(&spec, t)?;
        let oracle = brute_force_oracle(&spec, t)?;
        let a: BTreeSet<_> = ball.elements.iter().map(|g| g.canonical_integers()).collect();
        let b: BTreeSet<_> = oracle.iter().map(|g| g.canonical_integers()).collect();
        println!("{name}: {} elements at e^t = 6, oracle agrees: {}", ball.elements.len(), a == b);
    }

    // Counting does not materialize the ball.
    println!("|SL2(Z) ball| at t = 6: {}", ball_count(&GroupSpec::sl2z(), Height(6.0))?);

    let ball = enumerate_ball(&GroupSpec::sl2z(), Height(1.0))?;
    let mut text = Vec::new();
    write_ball(&mut text, ball.spec.family, ball.t.0, &ball.elements)?;
    print!("{}", String::from_utf8_lossy(&text));
    Ok(())
}
