use thiserror::Error;

/// Errors produced by state construction, statistics evaluation, and file parsing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("imaginary residue {residue:.3e} exceeds tolerance {tol:.1e}")]
    ImaginaryResidue { residue: f64, tol: f64 },

    #[error("negative probability {value:.3e} at index {index:?}")]
    NegativeProbability { value: f64, index: Vec<usize> },

    #[error("distribution not normalized: total probability {0}")]
    NotNormalized(f64),

    #[error("truncation insufficient: boundary amplitude {0:.3e}")]
    TruncationInsufficient(f64),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
