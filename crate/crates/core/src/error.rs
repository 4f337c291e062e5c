use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("m = {0} does not define a quadratic field (m must not be 0 or 1)")]
    DegenerateM(i64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),
    #[error("discriminant {0} is not negative")]
    NotNegative(i64),
    #[error("operation not supported for field {0}")]
    UnsupportedField(String),
    #[error("ideals belong to different fields")]
    FieldMismatch,
    #[error("empty set of ideals")]
    EmptySet,
    #[error("bound {got} too small (need at least {min})")]
    BoundTooSmall { got: u64, min: u64 },
    #[error("s = {0} must be greater than 1")]
    SNotGreaterThanOne(f64),
    #[error("family has {size} interacting members, inclusion-exclusion cap is {cap}")]
    TooLarge { size: usize, cap: usize },
    #[error("family contains duplicate members")]
    DuplicateMembers,
    #[error("interval bounds exceed the enumeration bound {0}")]
    BoundsExceedX(u64),
    #[error("arithmetic overflow: {0}")]
    Overflow(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
