//! A labeled and an unlabeled category overlap; one unlabeled input that
//! activates both spreads label mass to the empty one.

use lpart::{ArtParams, LpartModel, LpartParams};

fn main() -> lpart::Result<()> {
    let params = LpartParams::new(ArtParams::new(0.001, 0.8, 1.0)?, 0.5, 2.0, 1.0, 2)?;
    let mut model = LpartModel::new(params, 1)?;

    model.observe(&[0.2], Some(0))?;
    model.observe(&[0.5], None)?;
    let report = model.observe(&[0.35], None)?;
    println!("{report:?}");

    for (j, node) in model.nodes().iter().enumerate() {
        println!(
            "node {j}: w = {:?} q = {:?} direct = {}",
            node.weight(),
            node.density(),
            node.has_direct_label()
        );
    }
    let p = model.predict(&[0.5])?;
    println!("predict(0.5) -> {:?} (u1 {:.3}, u2 {:.3})", p.label, p.u1, p.u2);
    Ok(())
}
