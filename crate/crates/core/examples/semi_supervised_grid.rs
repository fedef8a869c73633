//! Single-pass runs over a grid of label rates, with and without the
//! unlabeled samples, plus the fuzzy ARTMAP baseline.

use lpart::{run_semi_supervised, ArtParams, ExperimentConfig, LpartParams, ModelKind, SyntheticClusters};

fn main() -> lpart::Result<()> {
    let data = SyntheticClusters::new(10, 10, 0.05, 2024)?;
    let (train, test) = (data.sample(500, 0), data.sample(100, 1));
    let params = LpartParams::new(ArtParams::new(0.001, 0.8, 1.0)?, 0.5, 2.0, 1.0, 10)?;

    println!("rate     lpart+unl   lpart       fam");
    for rate in [0.001, 0.01, 0.05, 0.2] {
        let mut row = format!("{:<8}", format!("{}%", rate * 100.0));
        for (model, unlabeled) in [
            (ModelKind::Lpart, true),
            (ModelKind::Lpart, false),
            (ModelKind::Fam, false),
        ] {
            let mut config = ExperimentConfig::new(params, rate);
            config.model = model;
            config.use_unlabeled = unlabeled;
            config.trials = 10;
            let acc = run_semi_supervised(&config, &train, &test)?.final_epoch().accuracy;
            row += &format!(" {:.3}±{:.3}", acc.mean, acc.std);
        }
        println!("{row}");
    }
    Ok(())
}
