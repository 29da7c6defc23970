use thiserror::Error;

/// Errors raised by the building blocks.
///
/// Numerical failures inside a solve are reported through
/// [`RetCode`](crate::RetCode) on the result; this type covers failures of
/// individual operations and configuration mistakes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },
    #[error("matrix is rank deficient (|R[{column},{column}]| = {value:e})")]
    RankDeficient { column: usize, value: f64 },
    #[error("matrix is not positive definite (pivot {pivot:e} at column {column})")]
    NotPositiveDefinite { column: usize, pivot: f64 },
    #[error("zero pivot in incomplete factorization at row {row}")]
    ZeroPivot { row: usize },
    #[error("Krylov breakdown after {iterations} iterations")]
    Breakdown { iterations: usize },
    #[error("decompression conflict at row {row}: columns {first} and {second} share a color")]
    DecompressionConflict {
        row: usize,
        first: usize,
        second: usize,
    },
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("residual cannot be evaluated on dual numbers")]
    NotDifferentiable,
    #[error("incompatible algorithm specification: {0}")]
    IncompatibleSpec(String),
    #[error("invalid bracket: f(a) = {fa}, f(b) = {fb}")]
    InvalidBracket { fa: f64, fb: f64 },
    #[error("line search failed after {0} backtracks")]
    LineSearchFailed(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unknown problem `{0}`")]
    UnknownProblem(String),
    #[error("deadline exceeded")]
    Timeout,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
