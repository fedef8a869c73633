//! Feature files and stream preparation.
//!
//! Binary layout (little-endian):
//!
//! ```text
//! magic "LPFT" | u32 version = 1 | u64 sample count | u32 dim | u32 class count
//! then per sample: i32 label (-1 = unlabeled) | dim x f32 features
//! ```
//!
//! A CSV variant with rows `label,f0,...,f{d-1}` (header row included) is
//! accepted wherever a path ends in `.csv`.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::error::{LpartError, Result};

pub const FEATURE_MAGIC: &[u8; 4] = b"LPFT";
pub const FEATURE_VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 24;
pub const UNLABELED: i32 = -1;

const SHUFFLE_STREAM: u64 = 0;
const MASK_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureSample {
    pub label: Option<usize>,
    pub features: Vec<f32>,
}

impl FeatureSample {
    pub fn new(features: Vec<f32>, label: Option<usize>) -> Self {
        FeatureSample { label, features }
    }

    pub fn features_f64(&self) -> Vec<f64> {
        self.features.iter().map(|&v| v as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureHeader {
    pub sample_count: u64,
    pub dim: u32,
    pub num_classes: u32,
}

/// An in-memory feature file.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    pub dim: usize,
    pub num_classes: usize,
    pub samples: Vec<FeatureSample>,
}

impl FeatureSet {
    pub fn new(dim: usize, num_classes: usize, samples: Vec<FeatureSample>) -> Result<Self> {
        let set = FeatureSet {
            dim,
            num_classes,
            samples,
        };
        set.validate(false)?;
        Ok(set)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labeled_count(&self) -> usize {
        self.samples.iter().filter(|s| s.label.is_some()).count()
    }

    fn header(&self) -> FeatureHeader {
        FeatureHeader {
            sample_count: self.samples.len() as u64,
            dim: self.dim as u32,
            num_classes: self.num_classes as u32,
        }
    }

    fn validate(&self, unit_range: bool) -> Result<()> {
        if self.dim == 0 || self.dim > u32::MAX as usize {
            return Err(LpartError::Config(format!("invalid dimension {}", self.dim)));
        }
        if self.num_classes == 0 || self.num_classes > i32::MAX as usize {
            return Err(LpartError::Config(format!("invalid class count {}", self.num_classes)));
        }
        for s in &self.samples {
            if s.features.len() != self.dim {
                return Err(LpartError::DimensionMismatch {
                    expected: self.dim,
                    found: s.features.len(),
                });
            }
            if let Some(label) = s.label.filter(|&l| l >= self.num_classes) {
                return Err(LpartError::LabelOutOfRange {
                    label,
                    num_classes: self.num_classes,
                });
            }
            check_features(&s.features, unit_range).map_err(|(index, value)| LpartError::FeatureOutOfRange {
                index,
                value: value as f64,
            })?;
        }
        Ok(())
    }
}

fn check_features(features: &[f32], unit_range: bool) -> std::result::Result<(), (usize, f32)> {
    for (i, &v) in features.iter().enumerate() {
        let ok = if unit_range {
            (0.0..=1.0).contains(&v)
        } else {
            v.is_finite()
        };
        if !ok {
            return Err((i, v));
        }
    }
    Ok(())
}

/// Sequential reader over a binary feature file. Holds one record at a time.
pub struct StreamReader<R> {
    inner: R,
    header: FeatureHeader,
    offset: u64,
    remaining: u64,
    unit_range: bool,
    failed: bool,
}

impl<R: Read> StreamReader<R> {
    /// Reads the header. With `unit_range` set, features outside `[0, 1]`
    /// are rejected; otherwise any finite value is accepted.
    pub fn new(mut inner: R, unit_range: bool) -> Result<Self> {
        let mut buf = [0u8; HEADER_LEN as usize];
        read_exact_at(&mut inner, &mut buf, 0)?;
        if &buf[..4] != FEATURE_MAGIC {
            return Err(LpartError::format(0, "bad magic, expected \"LPFT\""));
        }
        let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
        if version != FEATURE_VERSION {
            return Err(LpartError::format(4, format!("unsupported version {version}")));
        }
        let header = FeatureHeader {
            sample_count: u64::from_le_bytes(buf[8..16].try_into().unwrap()),
            dim: u32::from_le_bytes(buf[16..20].try_into().unwrap()),
            num_classes: u32::from_le_bytes(buf[20..24].try_into().unwrap()),
        };
        if header.dim == 0 {
            return Err(LpartError::format(16, "dimension must be positive"));
        }
        if header.num_classes == 0 || header.num_classes > i32::MAX as u32 {
            return Err(LpartError::format(
                20,
                format!("invalid class count {}", header.num_classes),
            ));
        }
        Ok(StreamReader {
            inner,
            header,
            offset: HEADER_LEN,
            remaining: header.sample_count,
            unit_range,
            failed: false,
        })
    }

    pub fn header(&self) -> FeatureHeader {
        self.header
    }

    fn next_record(&mut self) -> Result<FeatureSample> {
        let start = self.offset;
        let dim = self.header.dim as usize;
        let mut buf = vec![0u8; 4 + 4 * dim];
        read_exact_at(&mut self.inner, &mut buf, start)?;
        self.offset += buf.len() as u64;

        let raw = i32::from_le_bytes(buf[..4].try_into().unwrap());
        let label = match raw {
            UNLABELED => None,
            l if l >= 0 && (l as u32) < self.header.num_classes => Some(l as usize),
            l => {
                return Err(LpartError::format(
                    start,
                    format!("label {l} outside [-1, {})", self.header.num_classes),
                ))
            }
        };
        let features: Vec<f32> = buf[4..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if let Err((i, v)) = check_features(&features, self.unit_range) {
            return Err(LpartError::format(
                start + 4 + 4 * i as u64,
                format!("feature {i} has invalid value {v}"),
            ));
        }
        Ok(FeatureSample { label, features })
    }

    fn check_eof(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        loop {
            match self.inner.read(&mut probe) {
                Ok(0) => return Ok(()),
                Ok(_) => return Err(LpartError::format(self.offset, "trailing data after last record")),
                Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(e.into()),
            }
        }
    }
}

impl<R: Read> Iterator for StreamReader<R> {
    type Item = Result<FeatureSample>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let result = if self.remaining == 0 {
            match self.check_eof() {
                Ok(()) => return None,
                Err(e) => Err(e),
            }
        } else {
            self.remaining -= 1;
            self.next_record()
        };
        if result.is_err() {
            self.failed = true;
        }
        Some(result)
    }
}

fn read_exact_at<R: Read>(r: &mut R, buf: &mut [u8], offset: u64) -> Result<()> {
    r.read_exact(buf).map_err(|e| {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            LpartError::format(offset, "truncated file")
        } else {
            e.into()
        }
    })
}

/// Writes records one at a time; the record count must match the header.
pub struct StreamWriter<W: Write> {
    inner: W,
    header: FeatureHeader,
    written: u64,
}

impl<W: Write> StreamWriter<W> {
    pub fn new(mut inner: W, header: FeatureHeader) -> Result<Self> {
        inner.write_all(FEATURE_MAGIC)?;
        inner.write_all(&FEATURE_VERSION.to_le_bytes())?;
        inner.write_all(&header.sample_count.to_le_bytes())?;
        inner.write_all(&header.dim.to_le_bytes())?;
        inner.write_all(&header.num_classes.to_le_bytes())?;
        Ok(StreamWriter {
            inner,
            header,
            written: 0,
        })
    }

    pub fn write(&mut self, sample: &FeatureSample) -> Result<()> {
        if self.written == self.header.sample_count {
            return Err(LpartError::Config("more records than declared in header".into()));
        }
        if sample.features.len() != self.header.dim as usize {
            return Err(LpartError::DimensionMismatch {
                expected: self.header.dim as usize,
                found: sample.features.len(),
            });
        }
        let label = match sample.label {
            None => UNLABELED,
            Some(l) if l < self.header.num_classes as usize => l as i32,
            Some(l) => {
                return Err(LpartError::LabelOutOfRange {
                    label: l,
                    num_classes: self.header.num_classes as usize,
                })
            }
        };
        self.inner.write_all(&label.to_le_bytes())?;
        for v in &sample.features {
            self.inner.write_all(&v.to_le_bytes())?;
        }
        self.written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        if self.written != self.header.sample_count {
            return Err(LpartError::Config(format!(
                "wrote {} records, header declares {}",
                self.written, self.header.sample_count
            )));
        }
        self.inner.flush()?;
        Ok(self.inner)
    }
}

/// Opens a binary feature file for streaming, rejecting features outside `[0, 1]`.
pub fn read_stream(path: impl AsRef<Path>) -> Result<StreamReader<BufReader<File>>> {
    StreamReader::new(BufReader::new(File::open(path)?), true)
}

pub fn write_stream(path: impl AsRef<Path>, set: &FeatureSet) -> Result<()> {
    set.validate(false)?;
    let mut writer = StreamWriter::new(BufWriter::new(File::create(path)?), set.header())?;
    for s in &set.samples {
        writer.write(s)?;
    }
    writer.finish()?;
    Ok(())
}

fn is_csv(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Loads a whole feature file (binary or `.csv`), requiring features in `[0, 1]`.
pub fn read_features(path: impl AsRef<Path>) -> Result<FeatureSet> {
    load(path.as_ref(), true)
}

/// Like [`read_features`] but accepts any finite feature value.
pub fn read_features_raw(path: impl AsRef<Path>) -> Result<FeatureSet> {
    load(path.as_ref(), false)
}

fn load(path: &Path, unit_range: bool) -> Result<FeatureSet> {
    if is_csv(path) {
        return read_csv(path, unit_range);
    }
    let reader = StreamReader::new(BufReader::new(File::open(path)?), unit_range)?;
    let header = reader.header();
    let samples = reader.collect::<Result<Vec<_>>>()?;
    Ok(FeatureSet {
        dim: header.dim as usize,
        num_classes: header.num_classes as usize,
        samples,
    })
}

/// Writes binary or CSV depending on the extension.
pub fn write_features(path: impl AsRef<Path>, set: &FeatureSet) -> Result<()> {
    let path = path.as_ref();
    if is_csv(path) {
        write_csv(path, set)
    } else {
        write_stream(path, set)
    }
}

/// CSV rows `label,f0,...`; the class count is one more than the largest label.
pub fn read_csv(path: impl AsRef<Path>, unit_range: bool) -> Result<FeatureSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(csv_error)?;
    let mut samples = Vec::new();
    let mut dim = None;
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(csv_error)?;
        let offset = record.position().map_or(0, |p| p.byte());
        let bad = |msg: String| LpartError::format(offset, format!("row {}: {msg}", row + 1));
        let mut fields = record.iter();
        let label: i64 = fields
            .next()
            .ok_or_else(|| bad("empty row".into()))?
            .trim()
            .parse()
            .map_err(|e| bad(format!("label: {e}")))?;
        let label = match label {
            -1 => None,
            l if l >= 0 && l < i32::MAX as i64 => Some(l as usize),
            l => return Err(bad(format!("invalid label {l}"))),
        };
        let features = fields
            .map(|f| f.trim().parse::<f32>().map_err(|e| bad(format!("feature: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if *dim.get_or_insert(features.len()) != features.len() || features.is_empty() {
            return Err(bad(format!(
                "expected {} features, found {}",
                dim.unwrap_or(0),
                features.len()
            )));
        }
        if let Err((i, v)) = check_features(&features, unit_range) {
            return Err(bad(format!("feature {i} has invalid value {v}")));
        }
        samples.push(FeatureSample { label, features });
    }
    let num_classes = samples.iter().filter_map(|s| s.label).max().map_or(1, |m| m + 1);
    let dim = dim.ok_or_else(|| LpartError::format(0, "CSV file has no rows; dimension unknown"))?;
    Ok(FeatureSet {
        dim,
        num_classes,
        samples,
    })
}

pub fn write_csv(path: impl AsRef<Path>, set: &FeatureSet) -> Result<()> {
    set.validate(false)?;
    let mut writer = csv::Writer::from_path(path).map_err(csv_error)?;
    let mut header = vec!["label".to_string()];
    header.extend((0..set.dim).map(|i| format!("f{i}")));
    writer.write_record(&header).map_err(csv_error)?;
    for s in &set.samples {
        let mut row = vec![s.label.map_or(UNLABELED as i64, |l| l as i64).to_string()];
        row.extend(s.features.iter().map(|v| v.to_string()));
        writer.write_record(&row).map_err(csv_error)?;
    }
    writer.flush()?;
    Ok(())
}

fn csv_error(e: csv::Error) -> LpartError {
    let offset = e.position().map_or(0, |p| p.byte());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => LpartError::Io(io),
        kind => LpartError::format(offset, format!("{kind:?}")),
    }
}

/// Per-dimension `(min, max)` observed before rescaling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizationReport {
    pub ranges: Vec<(f64, f64)>,
}

impl NormalizationReport {
    fn empty(dim: usize) -> Self {
        NormalizationReport {
            ranges: vec![(f64::INFINITY, f64::NEG_INFINITY); dim],
        }
    }

    fn accumulate(&mut self, features: &[f32]) {
        for (r, &v) in self.ranges.iter_mut().zip(features) {
            let v = v as f64;
            r.0 = r.0.min(v);
            r.1 = r.1.max(v);
        }
    }

    /// Min-max rescale; constant dimensions map to 0.5.
    pub fn apply(&self, features: &mut [f32]) {
        for (v, &(lo, hi)) in features.iter_mut().zip(&self.ranges) {
            *v = if hi > lo {
                (((*v as f64) - lo) / (hi - lo)).clamp(0.0, 1.0) as f32
            } else {
                0.5
            };
        }
    }
}

/// Rescales every dimension of `set` to `[0, 1]` in place.
pub fn normalize_set(set: &mut FeatureSet) -> NormalizationReport {
    let mut report = NormalizationReport::empty(set.dim);
    for s in &set.samples {
        report.accumulate(&s.features);
    }
    for s in &mut set.samples {
        report.apply(&mut s.features);
    }
    report
}

/// Two-pass min-max normalization from one file to another. Binary files
/// are streamed; CSV files are loaded whole.
pub fn normalize(path_in: impl AsRef<Path>, path_out: impl AsRef<Path>) -> Result<NormalizationReport> {
    let (path_in, path_out) = (path_in.as_ref(), path_out.as_ref());
    if is_csv(path_in) || is_csv(path_out) {
        let mut set = read_features_raw(path_in)?;
        let report = normalize_set(&mut set);
        write_features(path_out, &set)?;
        return Ok(report);
    }

    let reader = StreamReader::new(BufReader::new(File::open(path_in)?), false)?;
    let header = reader.header();
    let mut report = NormalizationReport::empty(header.dim as usize);
    for sample in reader {
        report.accumulate(&sample?.features);
    }

    let reader = StreamReader::new(BufReader::new(File::open(path_in)?), false)?;
    let mut writer = StreamWriter::new(BufWriter::new(File::create(path_out)?), header)?;
    for sample in reader {
        let mut sample = sample?;
        report.apply(&mut sample.features);
        writer.write(&sample)?;
    }
    writer.finish()?;
    Ok(report)
}

/// Bernoulli label retention with a fixed seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaskSchedule {
    label_rate: f64,
    seed: u64,
}

impl MaskSchedule {
    pub fn new(label_rate: f64, seed: u64) -> Result<Self> {
        if !(0.0..=1.0).contains(&label_rate) {
            return Err(LpartError::InvalidParameter {
                name: "label_rate",
                value: label_rate,
                reason: "must lie in [0, 1]",
            });
        }
        Ok(MaskSchedule { label_rate, seed })
    }

    pub fn label_rate(&self) -> f64 {
        self.label_rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Keeps each label independently with probability `label_rate`. One draw
/// is consumed per sample so a sample's fate depends only on its position.
pub fn mask_labels(samples: &[FeatureSample], schedule: &MaskSchedule) -> Vec<FeatureSample> {
    let mut rng = seeded(schedule.seed, MASK_STREAM);
    samples
        .iter()
        .map(|s| {
            let keep = rng.random_bool(schedule.label_rate);
            FeatureSample {
                label: s.label.filter(|_| keep),
                features: s.features.clone(),
            }
        })
        .collect()
}

/// Seeded Fisher-Yates permutation.
pub fn shuffle<T: Clone>(items: &[T], seed: u64) -> Vec<T> {
    let mut out = items.to_vec();
    let mut rng = seeded(seed, SHUFFLE_STREAM);
    for i in (1..out.len()).rev() {
        let j = rng.random_range(0..=i);
        out.swap(i, j);
    }
    out
}

fn seeded(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Isotropic Gaussian blobs, one per class, with seeded centers in `[0.2, 0.8]^d`.
#[derive(Debug, Clone)]
pub struct SyntheticClusters {
    centers: Vec<Vec<f64>>,
    spread: f64,
    seed: u64,
}

impl SyntheticClusters {
    pub fn new(num_classes: usize, dim: usize, spread: f64, seed: u64) -> Result<Self> {
        if num_classes == 0 || dim == 0 {
            return Err(LpartError::Config("class count and dimension must be positive".into()));
        }
        if !(spread > 0.0 && spread.is_finite()) {
            return Err(LpartError::InvalidParameter {
                name: "spread",
                value: spread,
                reason: "must be finite and > 0",
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let centers = (0..num_classes)
            .map(|_| (0..dim).map(|_| rng.random_range(0.2..=0.8)).collect())
            .collect();
        Ok(SyntheticClusters { centers, spread, seed })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    /// Draws `per_class` samples of every class, interleaved class by class.
    /// Different `stream` values give independent draws around the same centers.
    pub fn sample(&self, per_class: usize, stream: u64) -> FeatureSet {
        let mut rng = seeded(self.seed, stream + 2);
        let noise = Normal::new(0.0, self.spread).expect("spread validated at construction");
        let dim = self.centers[0].len();
        let mut samples = Vec::with_capacity(per_class * self.centers.len());
        for _ in 0..per_class {
            for (class, center) in self.centers.iter().enumerate() {
                let features = center
                    .iter()
                    .map(|&c| (c + noise.sample(&mut rng)).clamp(0.0, 1.0) as f32)
                    .collect();
                samples.push(FeatureSample {
                    label: Some(class),
                    features,
                });
            }
        }
        FeatureSet {
            dim,
            num_classes: self.centers.len(),
            samples,
        }
    }
}

/// One-shot form of [`SyntheticClusters`].
pub fn synth_clusters(
    num_classes: usize,
    dim: usize,
    samples_per_class: usize,
    spread: f64,
    seed: u64,
) -> Result<FeatureSet> {
    Ok(SyntheticClusters::new(num_classes, dim, spread, seed)?.sample(samples_per_class, 0))
}
