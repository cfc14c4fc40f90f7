use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("corrupt structure: {0}")]
    Corrupt(String),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_range<T>(
    what: &str,
    value: impl std::fmt::Display,
    range: impl std::fmt::Display,
) -> Result<T> {
    Err(Error::OutOfRange(format!("{what} {value} not in {range}")))
}
