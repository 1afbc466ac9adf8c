use thiserror::Error;

/// Errors raised by the scan library.
#[derive(Debug, Error)]
pub enum ScanError {
    #[error("duplicate id `{0}`")]
    DuplicateId(String),

    #[error("duplicate coordinates ({x}, {y}) for sites `{first}` and `{second}`")]
    DuplicateCoordinates {
        first: String,
        second: String,
        x: f64,
        y: f64,
    },

    #[error("non-finite coordinate for site `{0}`")]
    NonFiniteCoordinate(String),

    #[error("non-finite value for site `{id}` at time index {time_index}")]
    NonFiniteValue { id: String, time_index: usize },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("io error on `{path}`: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error in `{path}`: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

impl ScanError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ScanError::Invalid(msg.into())
    }

    /// True for errors caused by degenerate (zero-dispersion) data rather than bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, ScanError::Degenerate(_))
    }
}

pub type Result<T> = std::result::Result<T, ScanError>;
