use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the model, the simulator and the harness.
#[derive(Debug, Error)]
pub enum Error {
    /// A scenario or channel parameter is outside its valid domain.
    #[error("configuration error: {0}")]
    Config(String),

    /// The analytic model could not be evaluated for a valid configuration.
    #[error("model error: {0}")]
    Model(String),

    /// A caller passed arguments that do not fit the operation.
    #[error("usage error: {0}")]
    Usage(String),

    /// A BLER look-up table file could not be loaded.
    #[error("BLER table {}: {msg}", path.display())]
    BlerTable { path: PathBuf, msg: String },

    /// Measurement requested before enough history was collected.
    #[error("not ready: {0}")]
    NotReady(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("manifest parse error: {0}")]
    Manifest(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
