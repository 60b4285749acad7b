use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (supported: 1..={max})", max = crate::cube::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("operation is only defined in dimension 1, found dimension {0}")]
    RequiresDimOne(usize),

    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value {0}")]
    NonFinite(f64),

    #[error("invalid cube: {0}")]
    InvalidCube(String),

    #[error("cube {0} does not lie inside the root cube")]
    OutsideRoot(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{name} = {value} is out of range ({expected})")]
    OutOfRange { name: &'static str, value: f64, expected: &'static str },

    #[error("weight must be strictly positive, found leaf value {0}")]
    NonPositiveWeight(f64),

    #[error("function must be non-negative, found leaf value {0}")]
    Negative(f64),

    #[error("invalid shift entry {index}: {reason}")]
    InvalidShiftEntry { index: usize, reason: String },

    #[error("invalid Young function: {0}")]
    InvalidYoung(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(name: &'static str, value: f64, ok: bool, expected: &'static str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::OutOfRange { name, value, expected })
    }
}
