//! Ten passes over one masked stream; prints the per-epoch table.

use lpart::{run_continual, ArtParams, ExperimentConfig, LpartParams, SyntheticClusters};

fn main() -> lpart::Result<()> {
    let data = SyntheticClusters::new(10, 10, 0.05, 2024)?;
    let (train, test) = (data.sample(500, 0), data.sample(100, 1));
    let params = LpartParams::new(ArtParams::new(0.001, 0.8, 1.0)?, 0.5, 2.0, 1.0, 10)?;

    let mut config = ExperimentConfig::new(params, 0.001);
    config.epochs = 10;
    config.trials = 5;
    let report = run_continual(&config, &train, &test)?;
    print!("{report}");
    Ok(())
}
