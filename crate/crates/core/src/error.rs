use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration too large: {count} items exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },

    #[error("too many categories for subset iteration: d = {d} (maximum {max})")]
    TooManyCategories { d: usize, max: usize },

    #[error("nu_{{c,d}} is not a probability for c = {c}, d = {d}")]
    NotAProbability { c: f64, d: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("sample with support {0} does not match any expected face")]
    Unclassifiable(String),

    #[error("bin {index} has zero base-measure mass")]
    ZeroMassBin { index: usize },

    #[error("evaluation vector must be strictly positive")]
    NonPositive,
}

pub type Result<T> = std::result::Result<T, Error>;
