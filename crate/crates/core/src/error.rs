use thiserror::Error;

/// Errors raised by the tree, partition and counting routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("input outside the encodable domain: {0}")]
    Domain(String),
    #[error("malformed embedding: {0}")]
    MalformedEmbedding(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("containment table has no entry for {0}")]
    MissingTableEntry(String),
    #[error("reconstruction failed: {0}")]
    Reconstruction(String),
    #[error("parse error: {0}")]
    Parse(String),
    /// A cross-check between two independent computations disagreed.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
