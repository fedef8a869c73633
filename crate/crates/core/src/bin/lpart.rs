use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lpart::experiment::trial_stream;
use lpart::fam::FAM_MAGIC;
use lpart::model::MODEL_MAGIC;
use lpart::snapshot::peek_magic;
use lpart::stream::{mask_labels, normalize, read_features, read_features_raw, write_features};
use lpart::{
    report_emit, run_continual, run_semi_supervised, ArtParams, ExperimentConfig, ExperimentReport, FamModel,
    FeatureSet, LpartError, LpartModel, LpartParams, MaskSchedule, ModelKind, ReportFormat, Result, SyntheticClusters,
};

#[derive(Parser)]
#[command(name = "lpart", version, about = "Label-propagating Fuzzy ART experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate labeled Gaussian blobs in [0, 1]^d.
    Synth {
        #[arg(long, default_value_t = 10)]
        classes: usize,
        #[arg(long, default_value_t = 10)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        per_class: usize,
        #[arg(long, default_value_t = 0.05)]
        spread: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sample stream; use different streams of one seed for train and test.
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Min-max rescale every dimension to [0, 1].
    Normalize {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Drop labels at random, keeping each with probability --label-rate.
    Mask {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        label_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Single-pass semi-supervised runs over several trials.
    RunSemi(RunArgs),
    /// Multi-epoch runs with uncertainty filtering.
    RunContinual(RunArgs),
    /// Train one model on --train (masked with --label-rate and --seed) and save it.
    Snapshot {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        train: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        label_rate: f64,
        #[arg(long)]
        use_unlabeled: Option<bool>,
        #[arg(long, default_value_t = 1)]
        epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify every sample of --test with a saved model; writes JSON lines.
    Predict {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, default_value = "lpart")]
    model: ModelKind,
    #[arg(long, default_value_t = 0.95)]
    rho: f64,
    #[arg(long, default_value_t = 0.001)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    delta: f64,
    #[arg(long, default_value_t = 2.0)]
    c_uncert: f64,
    #[arg(long, default_value_t = 1.0)]
    k_sens: f64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    label_rate: f64,
    /// Defaults to true for lpart and false for fam.
    #[arg(long)]
    use_unlabeled: Option<bool>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    theta1: f64,
    #[arg(long, default_value_t = 0.5)]
    theta2: f64,
    #[arg(long)]
    reshuffle_epochs: bool,
    /// Report file; without it a summary table goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

impl ModelArgs {
    fn params(&self, num_classes: usize) -> Result<LpartParams> {
        let art = ArtParams::new(self.alpha, self.rho, self.beta)?;
        LpartParams::new(art, self.delta, self.c_uncert, self.k_sens, num_classes)
    }
}

fn config_error(e: LpartError) -> LpartError {
    match e {
        LpartError::InvalidParameter { .. } | LpartError::Config(_) => e,
        other => LpartError::Config(other.to_string()),
    }
}

fn run(args: RunArgs, continual: bool) -> Result<()> {
    let train = read_features(&args.train)?;
    let test = read_features(&args.test)?;
    let params = args
        .model
        .params(train.num_classes.max(test.num_classes))
        .map_err(config_error)?;
    let mut config = ExperimentConfig::new(params, args.label_rate);
    config.model = args.model.model;
    config.use_unlabeled = args.use_unlabeled.unwrap_or(args.model.model == ModelKind::Lpart);
    config.epochs = args.epochs.unwrap_or(if continual { 10 } else { 1 });
    config.trials = args.trials;
    config.base_seed = args.seed;
    config.theta1 = args.theta1;
    config.theta2 = args.theta2;
    config.reshuffle_epochs = args.reshuffle_epochs;
    config.train_path = Some(args.train.display().to_string());
    config.test_path = Some(args.test.display().to_string());

    let report: ExperimentReport = if continual {
        run_continual(&config, &train, &test)?
    } else {
        run_semi_supervised(&config, &train, &test)?
    };
    match args.out {
        Some(path) => report_emit(&report, args.format, path),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct PredictionLine {
    index: usize,
    truth: Option<usize>,
    label: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    u2: Option<f64>,
}

fn predict(snapshot: PathBuf, test: PathBuf, out: Option<PathBuf>) -> Result<()> {
    let bytes = std::fs::read(snapshot)?;
    let test: FeatureSet = read_features(test)?;
    let lines: Vec<PredictionLine> = match peek_magic(&bytes) {
        Some(m) if &m == MODEL_MAGIC => {
            let model = LpartModel::from_bytes(&bytes)?;
            test.samples
                .iter()
                .enumerate()
                .map(|(index, s)| {
                    let p = model.predict(&s.features_f64())?;
                    Ok(PredictionLine {
                        index,
                        truth: s.label,
                        label: p.label,
                        u1: Some(p.u1),
                        u2: Some(p.u2),
                    })
                })
                .collect::<Result<_>>()?
        }
        Some(m) if &m == FAM_MAGIC => {
            let model = FamModel::from_bytes(&bytes)?;
            test.samples
                .iter()
                .enumerate()
                .map(|(index, s)| {
                    Ok(PredictionLine {
                        index,
                        truth: s.label,
                        label: Some(model.predict(&s.features_f64())?),
                        u1: None,
                        u2: None,
                    })
                })
                .collect::<Result<_>>()?
        }
        _ => {
            return Err(LpartError::Format {
                offset: 0,
                message: "unknown snapshot magic".into(),
            })
        }
    };

    let mut text = String::new();
    for line in &lines {
        text.push_str(&serde_json::to_string(line).expect("prediction serializes"));
        text.push('\n');
    }
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn snapshot(
    model: ModelArgs,
    train: PathBuf,
    label_rate: f64,
    use_unlabeled: Option<bool>,
    epochs: usize,
    seed: u64,
    out: PathBuf,
) -> Result<()> {
    let set = read_features(train)?;
    let params = model.params(set.num_classes).map_err(config_error)?;
    let mut config = ExperimentConfig::new(params, label_rate);
    config.model = model.model;
    config.use_unlabeled = use_unlabeled.unwrap_or(model.model == ModelKind::Lpart);
    config.epochs = epochs;
    config.validate()?;
    let stream = trial_stream(&config, &set, seed)?;

    let bytes = match model.model {
        ModelKind::Lpart => {
            let mut m = LpartModel::new(params, set.dim)?;
            for _ in 0..epochs {
                for s in &stream {
                    m.observe(&s.features_f64(), s.label)?;
                }
            }
            m.to_bytes()
        }
        ModelKind::Fam => {
            let mut m = FamModel::new(*params.art(), set.num_classes, set.dim)?;
            for _ in 0..epochs {
                for s in &stream {
                    m.observe(&s.features_f64(), s.label)?;
                }
            }
            m.to_bytes()
        }
    };
    std::fs::write(out, bytes)?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            classes,
            dim,
            per_class,
            spread,
            seed,
            stream,
            out,
        } => {
            let data = SyntheticClusters::new(classes, dim, spread, seed).map_err(config_error)?;
            write_features(out, &data.sample(per_class, stream))
        }
        Command::Normalize { input, out } => normalize(input, out).map(|_| ()),
        Command::Mask {
            input,
            label_rate,
            seed,
            out,
        } => {
            let schedule = MaskSchedule::new(label_rate, seed).map_err(config_error)?;
            let mut set = read_features_raw(input)?;
            set.samples = mask_labels(&set.samples, &schedule);
            write_features(out, &set)
        }
        Command::RunSemi(args) => run(args, false),
        Command::RunContinual(args) => run(args, true),
        Command::Snapshot {
            model,
            train,
            label_rate,
            use_unlabeled,
            epochs,
            seed,
            out,
        } => snapshot(model, train, label_rate, use_unlabeled, epochs, seed, out),
        Command::Predict { snapshot, test, out } => predict(snapshot, test, out),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_data_error() { 3 } else { 2 })
        }
    }
}
