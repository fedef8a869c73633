use std::io;

use thiserror::Error;

pub type Result<T, E = LpartError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LpartError {
    /// A feature value fell outside `[0, 1]` (or was not finite).
    #[error("feature value {value} at index {index} is outside [0, 1]")]
    FeatureOutOfRange { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("class label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("precondition violated: {0}")]
    Precondition(&'static str),

    #[error("invalid model state: {0}")]
    State(&'static str),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl LpartError {
    pub(crate) fn format(offset: u64, message: impl Into<String>) -> Self {
        LpartError::Format {
            offset,
            message: message.into(),
        }
    }

    /// True for errors caused by bad input data rather than bad configuration.
    pub fn is_data_error(&self) -> bool {
        !matches!(self, LpartError::Config(_) | LpartError::InvalidParameter { .. })
    }
}
