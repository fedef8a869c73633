//! Supervised fuzzy ARTMAP with match tracking: two overlapping classes.

use lpart::{ArtParams, FamModel};

fn main() -> lpart::Result<()> {
    let mut fam = FamModel::new(ArtParams::new(0.001, 0.5, 1.0)?, 2, 1)?;
    for (x, y) in [(0.2, 0), (0.4, 0), (0.45, 1), (0.9, 1), (0.3, 0)] {
        let node = fam.observe(&[x], Some(y))?;
        println!("observe({x}, {y}) -> node {node}");
    }
    for (j, n) in fam.nodes().iter().enumerate() {
        println!("node {j}: class {} w = {:?}", n.class_label(), n.weight());
    }
    for x in [0.1, 0.42, 0.5, 0.8] {
        println!("predict({x}) = {}", fam.predict(&[x])?);
    }
    Ok(())
}
