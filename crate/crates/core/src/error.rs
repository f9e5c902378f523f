use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("zero vector has no limit")]
    ZeroVector,
    #[error("element is zero")]
    ZeroElement,
    #[error("element is a unit")]
    UnitElement,
    #[error("unit ideal")]
    UnitIdeal,
    #[error("truncation too small: colength exceeds N={0}")]
    TruncationTooSmall(usize),
    #[error("classification failure: {0}")]
    ClassificationFailure(String),
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cross-check mismatch: {0}")]
    CrossCheck(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
