//! Error types shared across the crate.

use thiserror::Error;

/// Errors surfaced by estimation, geometry, and diagnostic routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("model does not support this operation: {0}")]
    UnsupportedModel(String),

    #[error("alpha = {0} is singular for the power-mean divergence; use the kl or hellinger kinds")]
    SingularAlpha(f64),

    #[error("density values must be strictly positive, got {0}")]
    InvalidDensity(f64),

    #[error("ratio values must be strictly positive, got {0}")]
    InvalidRatio(f64),

    #[error("missing argument: {0}")]
    MissingArgument(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("degenerate weights: class {0} has no strictly positive weight")]
    DegenerateWeights(&'static str),

    #[error("schedule has alpha = {0}, but this chain requires the linear-mixture geodesic (alpha = -1)")]
    WrongGeodesic(f64),

    #[error("bridge at lambda = {lambda} collapsed: effective sample size {ess:.3} < 2")]
    CollapsedBridge { lambda: f64, ess: f64 },

    #[error("sample is empty")]
    EmptySample,

    #[error("weight vector sums to zero")]
    ZeroWeightSum,

    #[error("unsupported split: n_s = {n_s} and n_t = {n_t} must be equal")]
    UnsupportedSplit { n_s: usize, n_t: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
