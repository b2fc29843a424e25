use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("scalars from different fields")]
    MixedFields,
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("cannot parse scalar {0:?}")]
    ParseScalar(String),
    #[error("empty input")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("the zero vector is not a projective point")]
    ZeroPoint,
    #[error("duplicate point at index {0}")]
    DuplicatePoint(usize),
    #[error("invalid plane configuration: {0}")]
    InvalidConfiguration(String),
    #[error("field too small: {0}")]
    FieldTooSmall(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("resampling budget exceeded after {0} attempts")]
    ResampleBudgetExceeded(usize),
    #[error("search budget exceeded after {0} nodes")]
    BudgetExceeded(u64),
    #[error("ground set too large: {size} > {cap}")]
    GroundTooLarge { size: usize, cap: usize },
    #[error("CB verdicts are not downward closed: CB({upper}) holds but CB({lower}) fails")]
    NonMonotone { lower: u32, upper: u32 },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
