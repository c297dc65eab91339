use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a primitive (non-finite input, non-positive exponent).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid parameter combination (stable law, FLOC exponents, levels).
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A season whose FLOM estimate is zero, or a constant series fed to an estimator.
    #[error("degenerate data: {0}")]
    Degenerate(String),

    #[error("singular system for season {season}, lag {lag} (condition number {condition:.3e})")]
    Singular { season: usize, lag: usize, condition: f64 },

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("fit failed for season {season}: {reason}")]
    Fit { season: usize, reason: String },

    #[error("ingestion error: {0}")]
    Ingest(String),

    #[error("preprocessing error: {0}")]
    Preprocess(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
