use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("corpus parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("duplicate segment id {0:?}")]
    DuplicateSegmentId(String),

    #[error("corpus has no segments")]
    EmptyCorpus,

    #[error("empty graph")]
    EmptyGraph,

    #[error("partition covers {found} elements but {expected} were expected")]
    PartitionMismatch { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
