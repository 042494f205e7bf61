//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by every pipeline stage.
///
/// The variants double as severity classes for the CLI exit-code mapping:
/// `Parameter` is a configuration problem, `Load`/`Data` are input problems,
/// everything else is a runtime failure.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input files.
    #[error("load error: {0}")]
    Load(String),

    /// Invalid argument or configuration value.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A component was used outside its fit/transform/predict contract.
    #[error("contract error: {0}")]
    Contract(String),

    /// Dataset content violates a stage precondition.
    #[error("data error: {0}")]
    Data(String),

    /// Model training, persistence, or prediction failure.
    #[error("model error: {0}")]
    Model(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Error for a method name that is recognized but intentionally not
    /// built in. The menu entries stay reserved so configurations written
    /// against the richer menus fail loudly instead of being remapped.
    pub fn extension_required(kind: &str, name: &str) -> Error {
        Error::Parameter(format!(
            "{kind} method '{name}' is not built-in; supply it via an extension wrapper \
             implementing the component contract"
        ))
    }
}
