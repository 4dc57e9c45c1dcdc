use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("base {0} is not prime")]
    NotPrime(u64),
    #[error("cannot invert zero in F_{0}")]
    ZeroInverse(u32),
    #[error("base mismatch: F_{left} vs F_{right}")]
    BaseMismatch { left: u32, right: u32 },
    #[error("enumeration of {what} needs {needed} items, limit is {limit}")]
    SizeOverflow {
        what: &'static str,
        needed: String,
        limit: u64,
    },
    #[error("point set has {got} points, expected a power of the base")]
    NotPowerCardinality { got: usize },
    #[error("base {b} too small for dimension {d}: need b >= {need}")]
    BaseTooSmall { b: u32, d: usize, need: usize },
    #[error("polynomial degree {degree} exceeds bound {bound}")]
    DegreeTooLarge { degree: i64, bound: usize },
    #[error("level cap {cap} exceeded: {reason}")]
    CapExceeded { cap: u32, reason: String },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("{0} has no terminating base-b expansion")]
    NonTerminatingExpansion(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeOverflow { .. } | Error::CapExceeded { .. } => 3,
            _ => 2,
        }
    }
}
