use qnd_core::QndError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Output was written but a cross-check exceeded its tolerance.
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(QndError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::InvalidParameter(_) => 2,
            Self::Io(_) => 3,
            Self::Validation(_) | Self::Numerical(_) => 4,
        }
    }
}

impl From<QndError> for CliError {
    fn from(e: QndError) -> Self {
        match e {
            QndError::NoConvergence(_) | QndError::ZeroNorm => Self::Numerical(e),
            // every other core error is a violated precondition of the request
            other => Self::InvalidParameter(other.to_string()),
        }
    }
}
