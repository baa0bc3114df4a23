use thiserror::Error;

use crate::solver::SolveTrace;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: left operand has dim {left}, right operand has dim {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("vector must have at least one coordinate")]
    EmptyVector,

    #[error("non-finite coordinate {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid exponent q = {0}: q must be greater than 1")]
    InvalidExponent(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("set-valued evaluation returned an empty set")]
    EmptySet,

    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("insufficient evidence: {0}")]
    InsufficientEvidence(String),

    #[error("operator has no affine realization: {0}")]
    NotAffine(String),

    #[error("H + rho*M is not surjective: {0}")]
    NonSurjective(String),

    #[error("resolvent iteration did not converge in {iterations} iterations (last residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },

    #[error("iteration diverged at n = {iteration}: {reason}")]
    Divergence {
        iteration: usize,
        reason: String,
        trace: Box<SolveTrace>,
    },

    #[error("missing constants: {}", .0.join(", "))]
    MissingConstants(Vec<&'static str>),

    #[error("radicand {0} is negative; the rate is undefined")]
    NegativeRadicand(f64),

    #[error("instance format: {0}")]
    Format(String),

    #[error("unknown built-in instance `{0}`")]
    UnknownInstance(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
