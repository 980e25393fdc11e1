use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("operation `{op}` is not defined for a {kind} algebra")]
    WrongKind { op: &'static str, kind: String },
    #[error("table entry for ({0}, {1}) lies outside the truncated table")]
    MissingEntry(String, String),
    #[error("bound exceeded: {0}")]
    BoundExceeded(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
