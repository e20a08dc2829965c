use crate::clusters::PairingFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unsupported field (p = {p}, ell = {ell}): {reason}")]
    UnsupportedField { p: u32, ell: u32, reason: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("degenerate pair: the two fixed points coincide")]
    DegeneratePair,

    #[error("singular matrix (determinant zero)")]
    SingularMatrix,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration is not clustered in separated pairs: {0}")]
    NotPaired(PairingFailure),

    #[error("no disc D_{j}^({i}) exists for this configuration")]
    Undefined { i: usize, j: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("folding did not stop after {0} steps")]
    FoldLimit(usize),
}
