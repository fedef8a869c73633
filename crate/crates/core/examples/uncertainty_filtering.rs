//! Entropy and count uncertainty on a small semi-supervised stream, and the
//! accuracy of the predictions that pass both thresholds.

use lpart::stream::{mask_labels, shuffle};
use lpart::{LpartModel, LpartParams, MaskSchedule, SyntheticClusters};

fn main() -> lpart::Result<()> {
    let data = SyntheticClusters::new(4, 3, 0.05, 11)?;
    let train = mask_labels(&shuffle(&data.sample(200, 0).samples, 1), &MaskSchedule::new(0.02, 1)?);
    let test = data.sample(50, 1);

    let mut params = LpartParams::with_defaults(4)?;
    params = LpartParams::new(params.art().with_rho(0.8)?, 0.5, 2.0, 1.0, 4)?;
    let mut model = LpartModel::new(params, 3)?;
    for s in &train {
        model.observe(&s.features_f64(), s.label)?;
    }

    let (theta1, theta2) = (0.5, 0.5);
    let (mut correct, mut kept, mut kept_correct) = (0, 0, 0);
    for s in &test.samples {
        let p = model.predict(&s.features_f64())?;
        let hit = p.label == s.label;
        correct += hit as usize;
        if p.u1 <= theta1 && p.u2 <= theta2 {
            kept += 1;
            kept_correct += hit as usize;
        }
    }
    let n = test.len() as f64;
    println!("{} nodes from {} samples", model.len(), train.len());
    println!("overall accuracy  {:.3}", correct as f64 / n);
    println!(
        "filtered accuracy {:.3} on {kept} samples",
        kept_correct as f64 / kept.max(1) as f64
    );
    println!("uncertain rate    {:.3}", 1.0 - kept as f64 / n);
    Ok(())
}
