use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller passed a value that violates an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An experiment or policy configuration is inconsistent.
    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    /// The covertype file could not be found.
    #[error("dataset not found at {}", path.display())]
    MissingData { path: PathBuf },

    #[error("malformed data at {location}: {message}")]
    Data { location: String, message: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("download failed: {0}")]
    Download(String),
}

impl Error {
    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
