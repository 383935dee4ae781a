use thiserror::Error;

/// Errors produced by vector construction and the decision procedures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty vector")]
    Empty,

    #[error("negative entry at index {index}: {value}")]
    NegativeEntry { index: usize, value: String },

    #[error("total mass is zero")]
    ZeroMass,

    #[error("entries sum to {sum}, not 1 (pass normalize to rescale)")]
    NotNormalized { sum: String },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("spectrum sizes differ: {left} vs {right} components")]
    CountMismatch { left: String, right: String },

    #[error("spectrum masses differ: {left} vs {right}")]
    MassMismatch { left: String, right: String },

    #[error("prefix position {position} outside 0..={total}")]
    PositionOutOfRange { position: String, total: String },

    #[error("copy count must be at least 1")]
    ZeroCopies,

    #[error("index {index} outside the valid range {range}")]
    IndexOutOfRange { index: usize, range: String },

    #[error("vector is uniform: {0}")]
    Uniform(&'static str),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("materializing {0} entries exceeds the size limit")]
    TooLarge(String),

    #[error("invalid float tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),

    #[error("cannot parse {literal:?}: {reason}")]
    Parse { literal: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
