use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable index X{index} at byte {pos} (indices start at 1)")]
    UnknownVariable { index: usize, pos: usize },

    #[error("variable index X{index} exceeds declared alphabet size {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("truncated Fock space of dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Errors caused by the caller's data rather than by a failed computation.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
