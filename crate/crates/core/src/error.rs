use thiserror::Error;

use crate::closure::BracketWord;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid qudit order l = {0}: must be at least 2")]
    InvalidOrder(usize),
    #[error("invalid qudit count n = {0}: must be at least 1")]
    InvalidQuditCount(usize),
    #[error("operator dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("comparand matrix is numerically zero")]
    DegenerateComparand,
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("exponent {value} at position {position} outside 0..{l}")]
    ExponentOutOfRange { position: usize, value: usize, l: usize },
    #[error("exponent vector has length {got}, expected {expected}")]
    ExponentLength { got: usize, expected: usize },
    #[error("no bracket word exists for the all-zero exponent vector")]
    NoWord,
    #[error("commutator generation failed for exponents {exponents:?}; last candidate {word}")]
    GenerationFailure { exponents: Vec<usize>, word: Box<BracketWord> },
    #[error("commutator generation is not covered for l = 2 (2n generators do not suffice)")]
    NotCovered,
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },
    #[error("generator set kind {found} where {expected} is required")]
    WrongKind { expected: &'static str, found: &'static str },
    #[error("reconstruction of T_{step} failed: bracket is not proportional to the true generator")]
    Reconstruction { step: usize },
    #[error("target is outside the certified span (relative residual {residual:e})")]
    OutsideSpan { residual: f64 },
    #[error("gate set is deficient: algebra dimension {algebra_dim} < {expected_dim}")]
    DeficientGateSet { algebra_dim: usize, expected_dim: usize },
    #[error("basis element needs bracket depth {needed} but the compiler is limited to {limit}")]
    DepthExhausted { needed: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid tolerance: abs_eps and rank_eps must be positive")]
    InvalidTolerance,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
