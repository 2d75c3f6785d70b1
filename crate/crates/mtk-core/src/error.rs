use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MtkError {
    #[error("shape mismatch: {0}")]
    Mismatch(String),
    #[error("induced map is not well defined: {0}")]
    IllDefined(String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
    #[error("unknown label {0}")]
    UnknownLabel(String),
    #[error("invalid multicategory: {0}")]
    InvalidMulticat(String),
    #[error("arity {got} exceeds the arity bound {bound}")]
    ArityExceeded { got: usize, bound: usize },
    #[error("no stabilisation within budget {0}")]
    NoStabilisation(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("graph is not path-finite: {0}")]
    Cyclic(String),
    #[error("enumeration bound exceeded: {0}")]
    EnumerationBound(String),
    #[error("isomorphism not found: {0}")]
    IsoNotFound(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, MtkError>;
