use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// Input data contained NaN or infinite values.
    #[error("non-finite value: {0}")]
    NumericDomain(String),
    /// A computed quantity failed an internal consistency check, usually
    /// because the grid is too coarse for the requested evaluation.
    #[error("numerical consistency check failed: {0}")]
    Consistency(String),
    /// A quadrature rule was used outside its accurate range.
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    /// A tabulated kernel was asked for arguments it does not cover.
    #[error("kernel table does not cover the reachable arguments: {0}")]
    TableDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
