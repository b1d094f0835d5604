use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VarError {
    #[error("line {line}: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("line {line}: non-positive price {price}")]
    NonPositivePrice { line: usize, price: f64 },

    #[error("duplicate date {0}")]
    DuplicateDate(String),

    #[error("missing or unexpected header, expected `{expected}`")]
    BadHeader { expected: String },

    #[error("insufficient data: need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate sample: {0}")]
    Degenerate(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("estimation failed on the first window ({0}); nothing to carry forward")]
    FirstWindowFailed(String),

    #[error("alignment failed: {0}")]
    Alignment(String),

    #[error("optimizer failure: {0}")]
    Optimization(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for VarError {
    fn from(e: std::io::Error) -> Self {
        VarError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, VarError>;
