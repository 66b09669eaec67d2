//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Shape mismatch between two operands.
    #[error("{op}: dimension mismatch {lhs:?} vs {rhs:?}")]
    Dim {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    /// A row that should be normalizable has (near-)zero norm, which signals
    /// a collapsed representation.
    #[error("degenerate embedding: row {row} has norm below 1e-12")]
    DegenerateEmbedding { row: usize },

    #[error("empty graph: operation requires at least one node")]
    EmptyGraph,

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("too few points: have {have}, need more than {need}")]
    TooFewPoints { have: usize, need: usize },

    #[error("unknown shape class: {0}")]
    UnknownClass(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("non-finite loss at epoch {epoch}, step {step} (embedding collapse or learning rate too high)")]
    NonFiniteLoss { epoch: usize, step: usize },

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data, 3 numerical.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidConfig(_) => 1,
            Error::Parse { .. }
            | Error::Io(_)
            | Error::Checkpoint(_)
            | Error::UnknownClass(_)
            | Error::TooFewPoints { .. }
            | Error::EmptyGraph => 2,
            Error::Dim { .. } | Error::DegenerateEmbedding { .. } | Error::NonFiniteLoss { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
