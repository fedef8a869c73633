//! Online semi-supervised continual learning with label-propagating Fuzzy ART.
//!
//! - [`art`]: complement coding, choice/match, vigilance, learning.
//! - [`model`]: the learner with label densities, propagation and uncertainty.
//! - [`fam`]: a simplified Fuzzy ARTMAP baseline.
//! - [`stream`]: feature files, normalization, label masking, synthetic data.
//! - [`experiment`]: seeded multi-trial protocols and reports.
//!
//! ```
//! use lpart::{LpartModel, LpartParams};
//!
//! let mut model = LpartModel::new(LpartParams::with_defaults(2)?, 2)?;
//! model.observe(&[0.2, 0.3], Some(0))?;
//! model.observe(&[0.21, 0.3], None)?;
//! let p = model.predict(&[0.2, 0.31])?;
//! assert_eq!(p.label, Some(0));
//! # Ok::<(), lpart::LpartError>(())
//! ```

// `!(x >= 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod art;
pub mod error;
pub mod experiment;
pub mod fam;
pub mod model;
pub mod snapshot;
pub mod stream;

pub use art::{complement_code, ArtParams, ComplementCoded};
pub use error::{LpartError, Result};
pub use experiment::{
    report_emit, run_continual, run_semi_supervised, ExperimentConfig, ExperimentReport, ModelKind, ReportFormat,
};
pub use fam::FamModel;
pub use model::{
    label_distribution, uncertainty_count, uncertainty_entropy, LpartModel, LpartNode, LpartParams, Observation,
    Prediction,
};
pub use stream::{FeatureSample, FeatureSet, MaskSchedule, SyntheticClusters};
