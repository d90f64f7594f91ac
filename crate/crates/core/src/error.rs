use thiserror::Error;

/// Errors produced by synthesis, the spectral kernels and the estimators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("invalid buffer: {0}")]
    InvalidBuffer(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("lag {lag} out of range (allowed {min}..={max})")]
    LagOutOfRange { lag: usize, min: usize, max: usize },

    #[error("buffer too short: need {needed} samples, have {available}")]
    BufferTooShort { needed: usize, available: usize },

    #[error("estimation failed in {stage}: {reason}")]
    EstimationFailed { stage: &'static str, reason: String },
}

impl Error {
    pub(crate) fn failed(stage: &'static str, reason: impl Into<String>) -> Self {
        Error::EstimationFailed {
            stage,
            reason: reason.into(),
        }
    }

    /// True when the error is a per-trial estimation miss rather than misuse.
    pub fn is_estimation_failure(&self) -> bool {
        matches!(self, Error::EstimationFailed { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
