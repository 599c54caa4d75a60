//! Error type shared by every module of the crate.

use thiserror::Error;

/// Failure modes of filter design, certification, the transform and the benchmark.
#[derive(Debug, Error)]
pub enum ConeletError {
    /// A parameter violates a hypothesis; the message names it.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("degree too large: exact expansion of the half-band polynomial overflows for K={k}, L={l}")]
    DegreeTooLarge { k: usize, l: usize },

    #[error("factorization failed: {0}")]
    FactorizationFailed(String),

    #[error("gamma out of range: {0}")]
    GammaOutOfRange(String),

    #[error("series diverged: {0}")]
    Diverged(String),

    #[error("J0 too large: {0}")]
    J0TooLarge(String),

    #[error("not certifiable: {0}")]
    NotCertifiable(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("scale overflow: {0}")]
    ScaleOverflow(String),

    #[error("curvature budget infeasible: {0}")]
    CurvatureInfeasible(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, ConeletError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(ConeletError::InvalidParams(msg.into()))
}
