use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("point is not on the model: {0}")]
    InvalidPoint(String),

    #[error("tangent vector is invalid: {0}")]
    InvalidTangent(String),

    #[error("invalid hyperplane: {0}")]
    InvalidHyperplane(String),

    #[error("degenerate point pair: {0}")]
    Degenerate(String),

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("region cannot be enclosed in a ball: {0}")]
    Unboundable(String),

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("no open hemisphere certificate exists for this cloud")]
    NoCertificate,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("hyperplane schedule exhausted after {0} steps")]
    ScheduleExhausted(usize),

    #[error("region generation failed: {0}")]
    Generation(String),

    #[error("invalid region document at {path}: {message}")]
    Document { path: String, message: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
