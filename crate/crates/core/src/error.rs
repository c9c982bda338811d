use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FvxError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("polytope has a non-binary vertex; the 0-1 oracle contract is violated")]
    NotBinaryPolytope,
    #[error("polytope has a non-integral vertex; box-integrality is violated")]
    NotIntegralPolytope,
    #[error("input is not a polytope (LP is unbounded)")]
    UnboundedInput,
    #[error("disjunctive hull over an empty list of blocks")]
    EmptyUnion,
    #[error("empty interval: b < a")]
    EmptyInterval,
    #[error("every point is forbidden")]
    AllForbidden,
    #[error("at most {cap} forbidden vertices are supported, got {got}")]
    CardinalityCap { cap: usize, got: usize },
    #[error("forbidden vertex {index} lies on every listed facet")]
    NoFaceExcludes { index: usize },
    #[error("matrix is not totally unimodular")]
    NotTu,
    #[error("right-hand side of row {0} is not integral")]
    NonIntegralRhs(usize),
    #[error("reduced matrix is {rows}x{cols}, above the 8x8 cap")]
    SizeCap { rows: usize, cols: usize },
    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),
    #[error("method `{method}` is incompatible with {reason}")]
    IncompatibleMethod { method: String, reason: String },
    #[error("invalid field `{field}`: {message}")]
    InvalidField { field: String, message: String },
    #[error("LP parse error at line {line}: {message}")]
    LpParse { line: usize, message: String },
}

impl FvxError {
    pub(crate) fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        FvxError::InvalidField {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = FvxError> = std::result::Result<T, E>;
