use thiserror::Error;

/// Errors produced by model construction, estimation, and detection.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter or argument violates its domain constraint.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A closed-form fact was requested outside the region where it holds.
    #[error("not available: {0}")]
    NotAvailable(String),

    /// The regression Gram matrix is numerically singular.
    #[error("singular design: {0}")]
    SingularDesign(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
