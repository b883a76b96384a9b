use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("input is empty")]
    EmptyInput,

    #[error("missing observation for {0}")]
    Gap(NaiveDate),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("moving-average window must be at least 1")]
    InvalidWindow,

    #[error("Hurst exponent {0} is outside (0, 1)")]
    InvalidHurst(f64),

    #[error("circulant embedding has eigenvalue {0:e} below tolerance")]
    Embedding(f64),

    #[error("explicit step is unstable: alpha * dt = {0}")]
    UnstableStep(f64),

    #[error("time must be non-negative, got {0}")]
    InvalidTime(f64),

    #[error("probability {0} is outside (0, 1)")]
    InvalidProbability(f64),

    #[error("interval lower bound {lower} exceeds upper bound {upper}")]
    InvalidInterval { lower: f64, upper: f64 },

    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("fit failed: {reason}")]
    Fit {
        reason: String,
        /// Best parameter vector reached before giving up, if any.
        best: Option<Vec<f64>>,
    },

    #[error("non-stationary excitation: gamma = {gamma} must be below beta = {beta}")]
    NonStationary { gamma: f64, beta: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn insufficient(needed: usize, got: usize) -> Self {
        Error::InsufficientData { needed, got }
    }
}
