use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("block size mismatch: {0} vs {1}")]
    BlockSizeMismatch(usize, usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("polynomial is not invertible modulo x^p + 1")]
    NonInvertible,
    #[error("block matrix is singular")]
    Singular,
    #[error("matrix is not circulant-block with block size {0}")]
    NotCirculant(usize),
    #[error("last parity-check block is singular")]
    LastBlockSingular,
    #[error("random sampling exhausted its retry budget: {0}")]
    ExhaustedRetries(&'static str),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("belief propagation did not converge")]
    DecodeFailure,
    #[error("no weight satisfies the work-factor formula")]
    InfeasibleWeight,
    #[error("speedup factor already applied")]
    SpeedupAlreadyApplied,
    #[error("no candidate survived validation")]
    NoCandidate,
    #[error("nothing found within the search budget")]
    NotFound,
}

pub type Result<T> = std::result::Result<T, Error>;
