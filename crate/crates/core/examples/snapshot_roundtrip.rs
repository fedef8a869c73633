//! Saves a trained model, restores it and checks that both copies keep
//! learning identically.

use lpart::{LpartModel, LpartParams, SyntheticClusters};

fn main() -> lpart::Result<()> {
    let data = SyntheticClusters::new(3, 2, 0.05, 5)?.sample(100, 0);
    let params = LpartParams::new(LpartParams::with_defaults(3)?.art().with_rho(0.85)?, 0.5, 2.0, 1.0, 3)?;
    let (first, rest) = data.samples.split_at(150);

    let mut model = LpartModel::new(params, 2)?;
    for s in first {
        model.observe(&s.features_f64(), s.label.filter(|_| s.features[0] < 0.5))?;
    }
    let bytes = model.to_bytes();
    println!("{} nodes, {} byte snapshot", model.len(), bytes.len());

    let mut restored = LpartModel::from_bytes(&bytes)?;
    for s in rest {
        model.observe(&s.features_f64(), None)?;
        restored.observe(&s.features_f64(), None)?;
    }
    println!(
        "identical after {} more observations: {}",
        rest.len(),
        model.to_bytes() == restored.to_bytes()
    );

    let mut truncated = bytes.clone();
    truncated.truncate(bytes.len() - 3);
    println!("truncated: {}", LpartModel::from_bytes(&truncated).unwrap_err());
    Ok(())
}
