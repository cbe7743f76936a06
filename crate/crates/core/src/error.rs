use thiserror::Error;

/// Errors raised by the library and the command harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("weighted Gram submatrix is singular for model {model:?}")]
    SingularModel { model: Vec<usize> },

    #[error("importance ratio is not finite (support violation)")]
    SupportViolation,

    #[error("trimmed importance values are all zero on the sample")]
    ZeroWeights,

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("{source_name}: row {row}: {message}")]
    Parse {
        source_name: String,
        row: usize,
        message: String,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 2 for validation problems, 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::SingularModel { .. }
            | Error::SupportViolation
            | Error::ZeroWeights
            | Error::NotPositiveDefinite(_)
            | Error::Numerical(_) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(values: &[f64], what: &str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}
