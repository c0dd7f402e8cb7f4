use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element shape {found:?} does not match algebra blocks {expected:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        found: Vec<usize>,
    },
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("element norm {0} exceeds 1")]
    NotContraction(f64),
    #[error("norm is degenerate: rank {rank} < dimension {dim}")]
    DegenerateNorm { rank: usize, dim: usize },
    #[error("kernel operator is not injective (smallest singular value {0:e})")]
    NotInjective(f64),
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("empty set")]
    EmptySet,
    #[error("invalid bridge: {0}")]
    InvalidBridge(String),
    #[error("no valid bridge candidate")]
    NoBridge,
    #[error("not an isometry: ‖U*U − I‖ = {0:e}")]
    NotIsometry(f64),
    #[error("isomorphism check failed: {0}")]
    NotIsomorphism(String),
    #[error("vacuum is not separating for the local algebra")]
    NotSeparating,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("net error: {0}")]
    Net(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
