use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A fuzzy set or data window has no usable content.
    #[error("degenerate set: {0}")]
    Degenerate(String),

    /// Two fuzzy sets were compared on different universes.
    #[error("grid mismatch: sets are discretized on different universes")]
    GridMismatch,

    /// A measure was applied to the wrong kind of fuzzy set.
    #[error("measure `{measure}` expects {expected} fuzzy sets")]
    KindMismatch { measure: String, expected: &'static str },

    /// The KRLS Schur complement vanished while admitting a dictionary element.
    #[error("singular KRLS update (r = {0:e})")]
    SingularUpdate(f64),

    #[error("unknown measure `{name}` (valid: {valid})")]
    UnknownMeasure { name: String, valid: String },

    #[error("invalid configuration field `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("ingestion error at row {row}: {reason}")]
    Ingestion { row: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(field: &str, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            reason: reason.into(),
        }
    }
}

pub(crate) fn config(field: &str, reason: impl Into<String>) -> Error {
    Error::config(field, reason)
}
