use thiserror::Error;

/// Errors produced by path construction, ingestion and the analysis routines.
#[derive(Error, Debug)]
pub enum PathError {
    #[error("empty input: no data rows")]
    EmptyInput,
    #[error("row {row}: non-monotone time {time} (previous {prev})")]
    NonMonotoneTime { row: usize, time: f64, prev: f64 },
    #[error("row {row}: duplicate time at row {row}")]
    DuplicateTime { row: usize },
    #[error("row {row}, column {col}: non-numeric cell '{cell}'")]
    NonNumericCell { row: usize, col: String, cell: String },
    #[error("row {row}: missing column (expected {expected} fields, got {got})")]
    MissingColumn { row: usize, expected: usize, got: usize },
    #[error("invalid header: expected 't,x1,...,xd', got '{0}'")]
    BadHeader(String),
    #[error("row {row}: non-finite value {value}")]
    NonFiniteValue { row: usize, value: f64 },
    #[error("first sample time must be 0, got {0}")]
    FirstTimeNonZero(f64),
    #[error("horizon {horizon} is before the last sample time {last}")]
    HorizonBeforeLastSample { horizon: f64, last: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("operation requires a 1-dimensional path, got d = {0}")]
    NotOneDimensional(usize),
    #[error("generator requires at least one step")]
    ZeroSteps,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("path too long for exhaustive oracle: {len} samples (max {max})")]
    PathTooLong { len: usize, max: usize },
    #[error("jump-size filter {eps} equals an existing jump magnitude of the integrator")]
    EpsOnJumpSize { eps: f64 },
    #[error("internal invariant violation: {0}")]
    InvariantViolation(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, PathError>;
