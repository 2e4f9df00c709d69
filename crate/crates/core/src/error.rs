use std::path::PathBuf;

/// Errors produced by the clustering toolkit.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid logarithm base {0}: must be a finite real greater than 1")]
    InvalidLogBase(f64),

    #[error("invalid cluster sizes: {0}")]
    InvalidClusterSizes(String),

    #[error("argument out of domain: {0}")]
    OutOfDomain(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("csv row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("image error: {0}")]
    Image(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
