//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data: bad ids, duplicate edges, inconsistent tables.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The straight-line drawing is not a planar embedding (crossing edges,
    /// overlapping edges at a vertex, or an inconsistent face structure).
    #[error("not a planar embedding: {0}")]
    NonPlanarEmbedding(String),

    /// The complex has a boundary edge that lies on no bounded face.
    #[error("complex is not admissible: {0}")]
    NotAdmissible(String),

    /// An operation that requires a connected input got a disconnected one.
    #[error("disconnected input: {0}")]
    Disconnected(String),

    /// A terminal set for a flow problem is empty or the two sets overlap.
    #[error("bad terminal sets: {0}")]
    BadTerminals(String),

    /// The form handed to `decompose` does not conserve at interior vertices.
    #[error("form is not a flow: {0}")]
    NotAFlow(String),

    /// An interior vertex carries a non-integer divergence.
    #[error("non-integral divergence {value} at vertex {vertex}")]
    NonIntegralDivergence { vertex: u32, value: f64 },

    /// A documented hypothesis of the requested transform fails on the input.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// A documented precondition of the operation fails on the input.
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    /// The input is beyond the exhaustive range of a brute-force oracle.
    #[error("input too large for exhaustive oracle: {0}")]
    TooLarge(String),

    /// An internal consistency assertion failed; indicates a bug, not bad input.
    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the CLI: 2 when a documented check refuses
    /// the input, 3 for malformed input, I/O trouble, or internal failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NonPlanarEmbedding(_)
            | Error::NotAdmissible(_)
            | Error::Disconnected(_)
            | Error::BadTerminals(_)
            | Error::NotAFlow(_)
            | Error::NonIntegralDivergence { .. }
            | Error::HypothesisViolated(_)
            | Error::PreconditionViolated(_)
            | Error::TooLarge(_) => 2,
            Error::InvalidInput(_) | Error::Internal(_) | Error::Io(_) | Error::Json(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
