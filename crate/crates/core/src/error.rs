use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("series diverges: {0}")]
    Divergence(String),

    #[error("numeric overflow at step {step}")]
    Overflow { step: usize },

    #[error("{0} requires a graph with at least one edge")]
    Edgeless(&'static str),

    #[error("degenerate vector: {0}")]
    Degenerate(String),

    #[error("graph too large: {0}")]
    TooLarge(String),

    #[error("rank-deficient design matrix")]
    RankDeficient,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
