use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("schema error at {position}: {message}")]
    Schema { position: String, message: String },

    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("enumeration of {projected} labelings exceeds the budget of {budget}")]
    InfeasibleEnumeration { projected: u128, budget: u128 },

    /// A guarantee that holds mathematically failed to hold. Always a bug.
    #[error("theorem violation: {0}")]
    TheoremViolation(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn schema(position: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            position: position.into(),
            message: message.into(),
        }
    }

    /// Process exit code used by the CLI: 2 for internal guarantee failures,
    /// 1 for everything attributable to the input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::TheoremViolation(_) => 2,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
