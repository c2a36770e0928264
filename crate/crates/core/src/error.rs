use thiserror::Error;

/// Errors produced by the search library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (max |m - m^H| = {residual:e})")]
    NonHermitian { residual: f64 },
    #[error("vectors are linearly dependent (vector {index} has relative pivot {pivot:e})")]
    RankDeficient { index: usize, pivot: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("duplicate target index {0}")]
    DuplicateTarget(usize),
    #[error("source {source_index} is orthogonal to the target space")]
    OrthogonalToTargets { source_index: usize },
    #[error("source space intersects the target space (largest overlap c = {c})")]
    RankViolation { c: f64 },
    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("overlap must be positive, got {0}")]
    NonPositiveC(f64),
    #[error("{what} out of range: {value}")]
    OutOfRange { what: &'static str, value: f64 },
    #[error("register outcome {m} has negligible probability {probability:e}")]
    ImprobableOutcome { m: usize, probability: f64 },
    #[error("infeasible size: N + M = {total} exceeds D = {dim}")]
    InfeasibleSize { total: usize, dim: usize },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("could not draw a valid instance after {attempts} attempts")]
    GenerationFailed { attempts: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable code, used on the CLI diagnostic stream.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonSquare { .. } => "NON_SQUARE",
            Error::NonHermitian { .. } => "NON_HERMITIAN",
            Error::RankDeficient { .. } => "RANK_DEFICIENT",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::DimensionMismatch(_) => "DIMENSION_MISMATCH",
            Error::DuplicateTarget(_) => "DUPLICATE_TARGET",
            Error::OrthogonalToTargets { .. } => "ORTHOGONAL_TO_TARGETS",
            Error::RankViolation { .. } => "RANK_VIOLATION",
            Error::NotNormalized { .. } => "NOT_NORMALIZED",
            Error::NonPositiveC(_) => "NON_POSITIVE_C",
            Error::OutOfRange { .. } => "OUT_OF_RANGE",
            Error::ImprobableOutcome { .. } => "IMPROBABLE_OUTCOME",
            Error::InfeasibleSize { .. } => "INFEASIBLE_SIZE",
            Error::DegenerateFit(_) => "DEGENERATE_FIT",
            Error::GenerationFailed { .. } => "GENERATION_FAILED",
            Error::Parse(_) => "PARSE_ERROR",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
