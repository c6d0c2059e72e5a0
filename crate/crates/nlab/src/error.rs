use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("base must be at least 2, got {0}")]
    InvalidBase(u32),

    #[error("block alphabet {base}^{width} does not fit a 32-bit digit")]
    AlphabetOverflow { base: u32, width: u32 },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("invalid pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid starred pattern: {0}")]
    InvalidStarredPattern(String),

    #[error("width mismatch: {0}")]
    WidthMismatch(String),

    #[error("base mismatch: {0}")]
    BaseMismatch(String),

    #[error("exact (rational) weights required: {0}")]
    ExactWeightsRequired(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at byte {pos} of {input:?}: {msg}")]
    Parse {
        input: String,
        pos: usize,
        msg: String,
    },

    #[error("pattern table needs {needed} entries, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("selection kind not supported here: {0}")]
    UnsupportedSelection(String),

    #[error("measure mismatch: {0}")]
    MeasureMismatch(String),

    #[error("malformed stream file: {0}")]
    MalformedStream(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
