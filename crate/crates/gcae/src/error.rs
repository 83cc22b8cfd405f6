//! Crate-wide error type.
//!
//! Every fallible public operation returns [`Result`]. The CLI maps error
//! categories onto distinct process exit codes (see `cli::exit_code`).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A tensor dimension did not match the operation's contract.
    #[error("shape mismatch in {context}: expected {expected}, got {got}")]
    ShapeMismatch {
        context: String,
        expected: String,
        got: String,
    },

    /// A single invalid configuration value or flag.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// All configuration problems found during validation, reported together.
    #[error("configuration errors:\n  {}", .0.join("\n  "))]
    ConfigList(Vec<String>),

    /// Malformed or inconsistent input data.
    #[error("data error: {0}")]
    Data(String),

    /// Input file could not be parsed.
    #[error("parse error in {path}: {message}")]
    Parse { path: String, message: String },

    /// A forward/backward pass or optimizer step produced NaN or infinity.
    #[error("non-finite value in {0}")]
    NonFinite(String),

    /// Analytic gradients disagreed with finite differences beyond tolerance.
    #[error("gradient check failed: {0}")]
    GradCheck(String),

    /// The requested operation is not defined for this model variant.
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn shape(context: impl Into<String>, expected: impl Into<String>, got: impl Into<String>) -> Self {
        Error::ShapeMismatch {
            context: context.into(),
            expected: expected.into(),
            got: got.into(),
        }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
