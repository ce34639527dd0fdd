use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("degenerate channel: zero-norm vector for user {user_id}")]
    DegenerateChannel { user_id: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("population too small: U = {u}, need U >= 3 so that ln ln U > 0")]
    PopulationTooSmall { u: usize },

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("shape is not unit norm: |‖s‖² - 1| = {deviation:e}")]
    NotUnitNorm { deviation: f64 },

    #[error("codebook generation failed: {0}")]
    Generation(String),

    #[error("codebook parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("codebook validation failed: {0}")]
    Validation(String),

    #[error("data integrity: {0}")]
    Integrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by caller-supplied values rather than runtime failures.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::InvalidDimension(_)
                | Error::InvalidParameter(_)
                | Error::PopulationTooSmall { .. }
                | Error::Domain(_)
        )
    }
}
