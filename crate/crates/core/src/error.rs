use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside the range an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("expected {expected} channel(s), found {found}")]
    Channels { expected: usize, found: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },

    /// Energy or gradient became non-finite during reconstruction.
    #[error("reconstruction diverged at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("metric error: {0}")]
    Metric(String),
}
