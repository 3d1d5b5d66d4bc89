//! The six homogeneous-space models: charts, the right action, the
//! invariant quadric and the closed-form limiting densities.
//!
//! `cargo run --release --example spaces`

use orbitstat::arith::GroupElement;
use orbitstat::spaces::{SpaceKind, SpaceModel};

fn main() -> orbitstat::Result<()> {
    let g = GroupElement::sl2z(2, 1, 1, 1)?;
    for kind in SpaceKind::ALL {
        let model = SpaceModel::new(kind);
        let chart: Vec<f64> = match kind.chart_dim() {
            1 => vec![0.4],
            2 => vec![0.3, 0.7],
            _ => vec![0.5, 1.0, 2.0],
        };
        let x = model.from_chart(&chart)?;
        println!("{} ({}): chart {:?} -> point {:?}", kind.name(), kind.chart_names().join(", "), chart, &x.0[..kind.point_dim()]);
        if kind.family().is_gaussian() || kind == SpaceKind::AffineSolvable {
            continue;
        }
        let g = if kind == SpaceKind::AffineSl2z { g.clone().with_translation([1, -2]) } else { g.clone() };
        let y = model.act(&x, &g)?;
        println!("  x·g chart {:?}, quadric before/after {:?} {:?}", model.chart(&y)?, model.quadric(&x), model.quadric(&y));
    }

    // Closed-form limit densities relative to the reference measure.
    let ds3 = SpaceModel::new(SpaceKind::DeSitter3);
    for r in [0.0, 0.5, 1.0] {
        let d = ds3.limit_density_chart(&[0.0, 1.0, 1.0], &[r, 1.0, 1.0])?;
        println!("de Sitter 3: density at r = {r} from r = 0: {d:.6}");
    }
    let plane = SpaceModel::new(SpaceKind::PuncturedPlane);
    println!("punctured plane: density at |y| = 2 from |x| = 1: {:.6}", plane.limit_density_chart(&[1.0, 0.0], &[2.0, 0.0])?);
    Ok(())
}
