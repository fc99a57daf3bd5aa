//! Crate-wide error type.
//!
//! Schema/parse failures (`Json`, `Schema`) are input errors; everything
//! else is a domain error. The CLI maps the two groups to different exit
//! codes.

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("halfspace region is unbounded")]
    Unbounded,
    #[error("operation undefined on the empty body")]
    EmptyBody,
    #[error("cone contains a line; no extreme-ray description exists")]
    NotPointed,
    #[error("euclidean volume is irrational: {0}")]
    IrrationalVolume(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("divisor class is not pseudoeffective")]
    NotPseudoeffective,
    #[error("subvariety lies inside the restricted base locus")]
    InsideRestrictedBaseLocus,
    #[error("flag curve lies inside the restricted base locus")]
    FlagCurveInBaseLocus,
    #[error("model inconsistent: {0}")]
    ModelInconsistent(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("json error: {0}")]
    Json(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// True for malformed-input failures, false for domain failures.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Json(_) | Error::Schema(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
