use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("duplicate cell ({row}, {col})")]
    DuplicateCell { row: String, col: String },

    #[error("non-finite rating {value} at ({row}, {col})")]
    NonFinite { row: String, col: String, value: f64 },

    #[error("unknown id: {0}")]
    UnknownId(String),

    #[error("missing cell ({row}, {col})")]
    MissingCell { row: String, col: String },

    #[error("no non-empty complete block exists")]
    NoCompleteBlock,

    #[error("merge group must contain at least 2 ids")]
    GroupTooSmall,

    #[error("duplicate id: {0}")]
    DuplicateId(String),

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("iteration cap exceeded without convergence (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("ray maps to zero (kernel ray)")]
    KernelRay,

    #[error("zero vector cannot define a ray")]
    ZeroVector,

    #[error("rank index {index} out of range (rank {rank})")]
    RankOutOfRange { index: usize, rank: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable process exit code for the CLI: 2 for data errors, 3 for
    /// convergence failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } => 3,
            _ => 2,
        }
    }
}
