use thiserror::Error;

use crate::degseq::Feasibility;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("vertex index {0} listed more than once")]
    DuplicateIndex(usize),

    #[error("U(m) requires an even point count, got {0}")]
    OddPointCount(u64),

    #[error("instance is infeasible: {0}")]
    Infeasible(Feasibility),

    #[error("{what} is {actual}, above the configured limit {limit}")]
    SizeLimit {
        what: &'static str,
        actual: u64,
        limit: u64,
    },

    #[error("invalid induced subgraph: {0}")]
    InvalidSubgraph(String),

    #[error("invalid pairing: {0}")]
    InvalidPairing(String),

    #[error("invalid switching site: {0}")]
    InvalidSite(String),

    #[error("class {key} was hit {hits} times in {trials} trials")]
    InsufficientData { key: String, hits: u64, trials: u64 },

    #[error("{0}")]
    OutOfRange(String),

    #[error("random graph model is empty (no graph has this degree sequence)")]
    EmptyModel,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
