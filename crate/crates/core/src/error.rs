use thiserror::Error;

pub type Result<T> = std::result::Result<T, FrameError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FrameError {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("invalid algebra: {0}")]
    InvalidSpec(String),

    #[error("matrix is not coisometric (‖MM* − I‖ = {residual:.3e})")]
    NotCoisometric { residual: f64 },

    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("frame is not tight (residual {residual:.3e}, b ≈ {b:.6})")]
    NotTight { residual: f64, b: f64 },

    #[error("index {index} out of range for k = {k}")]
    IndexOutOfRange { index: usize, k: usize },

    #[error("index set must be nonempty")]
    EmptyIndexSet,

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("block size {k_prime} does not divide k = {k}")]
    NotDivisible { k: usize, k_prime: usize },

    #[error("frame constants disagree: expected {expected}, part {part} has {found}")]
    MismatchedConstant { expected: f64, found: f64, part: usize },

    #[error("column {index} has a singular inner product (smallest eigenvalue {min_eigenvalue:.3e})")]
    DegenerateColumn { index: usize, min_eigenvalue: f64 },

    #[error("optimizer failed: {0}")]
    Optimizer(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for FrameError {
    fn from(e: serde_json::Error) -> Self {
        FrameError::Parse(e.to_string())
    }
}
