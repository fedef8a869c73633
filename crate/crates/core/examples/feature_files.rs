//! Writes synthetic data as binary and CSV feature files, masks and
//! normalizes them, and streams a file back record by record.

use lpart::stream::{mask_labels, normalize, read_features, read_stream, write_features};
use lpart::{MaskSchedule, SyntheticClusters};

fn main() -> lpart::Result<()> {
    let dir = std::env::temp_dir().join("lpart-feature-files");
    std::fs::create_dir_all(&dir)?;

    let mut set = SyntheticClusters::new(3, 4, 0.1, 7)?.sample(20, 0);
    write_features(dir.join("train.csv"), &set)?;
    set.samples = mask_labels(&set.samples, &MaskSchedule::new(0.3, 7)?);
    write_features(dir.join("masked.lpft"), &set)?;

    let report = normalize(dir.join("masked.lpft"), dir.join("normalized.lpft"))?;
    println!("ranges before rescaling: {:?}", report.ranges);

    let reader = read_stream(dir.join("normalized.lpft"))?;
    println!("header: {:?}", reader.header());
    for sample in reader.take(3) {
        println!("{:?}", sample?);
    }
    let back = read_features(dir.join("train.csv"))?;
    println!("csv: {} samples, {} labeled", back.len(), back.labeled_count());
    Ok(())
}
