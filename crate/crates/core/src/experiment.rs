//! Multi-trial experiment protocols.
//!
//! A trial shuffles the training stream, masks its labels, trains for one or
//! more passes and scores the test stream after every pass. Trial `t` uses
//! seed `base_seed + t` for both the shuffle and the mask, and trials are
//! independent, so they run in parallel and are reduced in index order.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LpartError, Result};
use crate::fam::FamModel;
use crate::model::{LpartModel, LpartParams};
use crate::stream::{self, FeatureSample, FeatureSet, MaskSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Lpart,
    Fam,
}

impl FromStr for ModelKind {
    type Err = LpartError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lpart" => Ok(ModelKind::Lpart),
            "fam" => Ok(ModelKind::Fam),
            other => Err(LpartError::Config(format!("unknown model kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Protocol {
    SemiSupervised,
    Continual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = LpartError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(LpartError::Config(format!("unknown report format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub params: LpartParams,
    pub label_rate: f64,
    pub use_unlabeled: bool,
    pub epochs: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub theta1: f64,
    pub theta2: f64,
    pub reshuffle_epochs: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub train_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_path: Option<String>,
}

impl ExperimentConfig {
    /// One-pass LPART run with unlabeled data, default thresholds of 0.5.
    pub fn new(params: LpartParams, label_rate: f64) -> Self {
        ExperimentConfig {
            model: ModelKind::Lpart,
            params,
            label_rate,
            use_unlabeled: true,
            epochs: 1,
            trials: 1,
            base_seed: 0,
            theta1: 0.5,
            theta2: 0.5,
            reshuffle_epochs: false,
            train_path: None,
            test_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(LpartError::Config("trials must be >= 1".into()));
        }
        if self.epochs == 0 {
            return Err(LpartError::Config("epochs must be >= 1".into()));
        }
        if !(self.theta1 >= 0.0) || !(self.theta2 >= 0.0) {
            return Err(LpartError::Config("uncertainty thresholds must be >= 0".into()));
        }
        MaskSchedule::new(self.label_rate, 0).map_err(|e| LpartError::Config(e.to_string()))?;
        if self.model == ModelKind::Fam && self.use_unlabeled {
            return Err(LpartError::Config(
                "fuzzy ARTMAP is fully supervised and cannot use unlabeled samples".into(),
            ));
        }
        Ok(())
    }
}

/// Test-set scores after one training pass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    /// Correct / test size; abstentions count as wrong.
    pub accuracy: f64,
    /// Accuracy over samples with `u1 <= theta1` and `u2 <= theta2`; `None`
    /// when no sample passes.
    pub filtered_accuracy: Option<f64>,
    pub filtered_count: usize,
    pub uncertain_rate: f64,
    pub abstain_count: usize,
    pub node_count: usize,
    pub test_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub seed: u64,
    /// Samples presented per epoch (after dropping unlabeled ones if requested).
    pub train_size: usize,
    pub labeled_count: usize,
    pub epochs: Vec<EpochMetrics>,
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Some(MeanStd { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochAggregate {
    pub epoch: usize,
    pub accuracy: MeanStd,
    /// Over the trials where at least one test sample passed the filter.
    pub filtered_accuracy: Option<MeanStd>,
    pub filtered_trials: usize,
    pub uncertain_rate: MeanStd,
    pub abstain_count: MeanStd,
    pub node_count: MeanStd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub protocol: Protocol,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialReport>,
    pub aggregate: Vec<EpochAggregate>,
}

impl ExperimentReport {
    pub fn final_epoch(&self) -> &EpochAggregate {
        self.aggregate.last().expect("at least one epoch")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Config echo as `#` comment lines, then one row per trial-epoch and
    /// one aggregate row per epoch.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# protocol: {}\n",
            serde_json::to_string(&self.protocol).unwrap()
        ));
        out.push_str(&format!("# config: {}\n", serde_json::to_string(&self.config).unwrap()));
        out.push_str(
            "scope,trial,epoch,accuracy,accuracy_std,filtered_accuracy,filtered_accuracy_std,\
             uncertain_rate,uncertain_rate_std,abstain_count,node_count\n",
        );
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for t in &self.trials {
            for e in &t.epochs {
                out.push_str(&format!(
                    "trial,{},{},{},0,{},{},{},0,{},{}\n",
                    t.trial,
                    e.epoch,
                    e.accuracy,
                    opt(e.filtered_accuracy),
                    opt(e.filtered_accuracy.map(|_| 0.0)),
                    e.uncertain_rate,
                    e.abstain_count,
                    e.node_count
                ));
            }
        }
        for a in &self.aggregate {
            out.push_str(&format!(
                "aggregate,,{},{},{},{},{},{},{},{},{}\n",
                a.epoch,
                a.accuracy.mean,
                a.accuracy.std,
                opt(a.filtered_accuracy.map(|m| m.mean)),
                opt(a.filtered_accuracy.map(|m| m.std)),
                a.uncertain_rate.mean,
                a.uncertain_rate.std,
                a.abstain_count.mean,
                a.node_count.mean
            ));
        }
        out
    }
}

/// Writes a report to `path` in the requested format.
pub fn report_emit(report: &ExperimentReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    let text = match format {
        ReportFormat::Json => report.to_json(),
        ReportFormat::Csv => report.to_csv(),
    };
    std::fs::write(path, text)?;
    Ok(())
}

/// Single-pass protocol; `epochs` must be 1.
pub fn run_semi_supervised(
    config: &ExperimentConfig,
    train: &FeatureSet,
    test: &FeatureSet,
) -> Result<ExperimentReport> {
    if config.epochs != 1 {
        return Err(LpartError::Config(
            "the semi-supervised protocol trains for exactly one epoch".into(),
        ));
    }
    run(Protocol::SemiSupervised, config, train, test)
}

/// Multi-pass protocol: the same masked stream is replayed every epoch
/// (reshuffled per epoch if `reshuffle_epochs` is set).
pub fn run_continual(config: &ExperimentConfig, train: &FeatureSet, test: &FeatureSet) -> Result<ExperimentReport> {
    run(Protocol::Continual, config, train, test)
}

fn run(
    protocol: Protocol,
    config: &ExperimentConfig,
    train: &FeatureSet,
    test: &FeatureSet,
) -> Result<ExperimentReport> {
    config.validate()?;
    if train.dim != test.dim {
        return Err(LpartError::Config(format!(
            "train dimension {} differs from test dimension {}",
            train.dim, test.dim
        )));
    }
    let num_classes = config.params.num_classes();
    if train.num_classes > num_classes || test.num_classes > num_classes {
        return Err(LpartError::Config(format!(
            "data declares {} classes but the model has {num_classes}",
            train.num_classes.max(test.num_classes)
        )));
    }
    let test_points = test
        .samples
        .iter()
        .map(|s| {
            s.label
                .map(|y| (s.features_f64(), y))
                .ok_or_else(|| LpartError::Config("test samples must all be labeled".into()))
        })
        .collect::<Result<Vec<_>>>()?;

    let trials = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, train, &test_points, t))
        .collect::<Result<Vec<_>>>()?;

    let aggregate = (0..config.epochs).map(|e| aggregate_epoch(&trials, e)).collect();
    Ok(ExperimentReport {
        protocol,
        config: config.clone(),
        trials,
        aggregate,
    })
}

enum Learner {
    Lpart(LpartModel),
    Fam(FamModel),
}

impl Learner {
    fn observe(&mut self, x: &[f64], y: Option<usize>) -> Result<()> {
        match self {
            Learner::Lpart(m) => m.observe(x, y).map(|_| ()),
            Learner::Fam(m) => match y {
                Some(_) => m.observe(x, y).map(|_| ()),
                None => Ok(()),
            },
        }
    }

    fn node_count(&self) -> usize {
        match self {
            Learner::Lpart(m) => m.len(),
            Learner::Fam(m) => m.len(),
        }
    }
}

/// Shuffled, masked (and optionally filtered) training stream for one trial.
pub fn trial_stream(config: &ExperimentConfig, train: &FeatureSet, seed: u64) -> Result<Vec<FeatureSample>> {
    let shuffled = stream::shuffle(&train.samples, seed);
    let mut masked = stream::mask_labels(&shuffled, &MaskSchedule::new(config.label_rate, seed)?);
    if !config.use_unlabeled || config.model == ModelKind::Fam {
        masked.retain(|s| s.label.is_some());
    }
    Ok(masked)
}

fn run_trial(
    config: &ExperimentConfig,
    train: &FeatureSet,
    test: &[(Vec<f64>, usize)],
    trial: usize,
) -> Result<TrialReport> {
    let seed = config.base_seed.wrapping_add(trial as u64);
    let samples = trial_stream(config, train, seed)?;
    let mut order: Vec<(Vec<f64>, Option<usize>)> = samples.iter().map(|s| (s.features_f64(), s.label)).collect();

    let mut learner = match config.model {
        ModelKind::Lpart => Learner::Lpart(LpartModel::new(config.params, train.dim)?),
        ModelKind::Fam => Learner::Fam(FamModel::new(
            *config.params.art(),
            config.params.num_classes(),
            train.dim,
        )?),
    };

    let mut epochs = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        if epoch > 0 && config.reshuffle_epochs {
            order = stream::shuffle(&order, epoch_seed(seed, epoch));
        }
        for (x, y) in &order {
            learner.observe(x, *y)?;
        }
        epochs.push(evaluate(&learner, test, config, epoch + 1)?);
    }

    Ok(TrialReport {
        trial,
        seed,
        train_size: samples.len(),
        labeled_count: samples.iter().filter(|s| s.label.is_some()).count(),
        epochs,
    })
}

fn epoch_seed(seed: u64, epoch: usize) -> u64 {
    seed ^ (epoch as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

fn evaluate(
    learner: &Learner,
    test: &[(Vec<f64>, usize)],
    config: &ExperimentConfig,
    epoch: usize,
) -> Result<EpochMetrics> {
    let mut correct = 0;
    let mut filtered = 0;
    let mut filtered_correct = 0;
    let mut abstain = 0;
    for (x, y) in test {
        // (predicted label, passes the uncertainty filter)
        let (label, certain) = match learner {
            Learner::Lpart(m) if m.is_empty() => (None, false),
            Learner::Lpart(m) => {
                let p = m.predict(x)?;
                let certain = !p.is_abstain() && p.u1 <= config.theta1 && p.u2 <= config.theta2;
                (p.label, certain)
            }
            Learner::Fam(m) if m.is_empty() => (None, false),
            // No uncertainty scores: every FAM answer passes the filter.
            Learner::Fam(m) => (Some(m.predict(x)?), true),
        };
        let hit = label == Some(*y);
        if label.is_none() {
            abstain += 1;
        }
        if hit {
            correct += 1;
        }
        if certain {
            filtered += 1;
            if hit {
                filtered_correct += 1;
            }
        }
    }
    let n = test.len();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    Ok(EpochMetrics {
        epoch,
        accuracy: ratio(correct, n),
        filtered_accuracy: (filtered > 0).then(|| ratio(filtered_correct, filtered)),
        filtered_count: filtered,
        uncertain_rate: if n == 0 { 0.0 } else { 1.0 - ratio(filtered, n) },
        abstain_count: abstain,
        node_count: learner.node_count(),
        test_size: n,
    })
}

fn aggregate_epoch(trials: &[TrialReport], epoch: usize) -> EpochAggregate {
    let column = |f: &dyn Fn(&EpochMetrics) -> f64| -> MeanStd {
        let values: Vec<f64> = trials.iter().map(|t| f(&t.epochs[epoch])).collect();
        MeanStd::from_values(&values).expect("at least one trial")
    };
    let filtered: Vec<f64> = trials
        .iter()
        .filter_map(|t| t.epochs[epoch].filtered_accuracy)
        .collect();
    EpochAggregate {
        epoch: epoch + 1,
        accuracy: column(&|e| e.accuracy),
        filtered_accuracy: MeanStd::from_values(&filtered),
        filtered_trials: filtered.len(),
        uncertain_rate: column(&|e| e.uncertain_rate),
        abstain_count: column(&|e| e.abstain_count as f64),
        node_count: column(&|e| e.node_count as f64),
    }
}

impl fmt::Display for ExperimentReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "epoch  accuracy         filtered         uncertain  nodes")?;
        for a in &self.aggregate {
            let filtered = a
                .filtered_accuracy
                .map(|m| format!("{:6.2} ± {:5.2}", 100.0 * m.mean, 100.0 * m.std))
                .unwrap_or_else(|| "     -         ".into());
            writeln!(
                f,
                "{:5}  {:6.2} ± {:5.2}  {}  {:8.2}%  {:7.1}",
                a.epoch,
                100.0 * a.accuracy.mean,
                100.0 * a.accuracy.std,
                filtered,
                100.0 * a.uncertain_rate.mean,
                a.node_count.mean
            )?;
        }
        Ok(())
    }
}
