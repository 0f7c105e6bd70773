use thiserror::Error;

/// Errors raised by the geometric, algebraic and reconstruction layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice basis is singular (|det| = {det:e})")]
    SingularBasis { det: f64 },

    #[error("basis must be a non-empty square matrix with finite entries")]
    MalformedBasis,

    #[error("cells do not tile the fundamental domain: {0}")]
    NotATiling(String),

    #[error("cell {cell} has {found} offsets but cell 0 has {expected}")]
    InconsistentK {
        cell: usize,
        expected: usize,
        found: usize,
    },

    #[error("cell {cell} repeats the offset {offset:?}")]
    DuplicateOffset { cell: usize, offset: Vec<i64> },

    #[error("malformed cell {cell}: {reason}")]
    MalformedCell { cell: usize, reason: String },

    #[error("point {0:?} lies on a gap between cells")]
    PointOnGap(Vec<f64>),

    #[error("point {0:?} is outside the domain")]
    OutOfDomain(Vec<f64>),

    #[error("region index {index} out of range for k = {k}")]
    RegionOutOfRange { index: usize, k: usize },

    #[error("frequency set is empty or contains repeated vectors")]
    InvalidFrequencySet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Vandermonde nodes {0} and {1} coincide")]
    DuplicateNodes(usize, usize),

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("cell {cell} has a numerically singular system (sigma_min = {sigma_min:e})")]
    SingularCell { cell: usize, sigma_min: f64 },

    #[error("cells carry different shift index sets; a single exponential system is undefined")]
    NonUniformShifts,

    #[error("shift position {index} out of range for k = {k}")]
    ShiftOutOfRange { index: usize, k: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no admissible (v, q) pair with v <= {v_max}, q <= {q_max}")]
    NoPairFound { v_max: u64, q_max: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Variant name, used in command-line diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularBasis { .. } => "SingularBasis",
            Error::MalformedBasis => "MalformedBasis",
            Error::NotATiling(_) => "NotATiling",
            Error::InconsistentK { .. } => "InconsistentK",
            Error::DuplicateOffset { .. } => "DuplicateOffset",
            Error::MalformedCell { .. } => "MalformedCell",
            Error::PointOnGap(_) => "PointOnGap",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::RegionOutOfRange { .. } => "RegionOutOfRange",
            Error::InvalidFrequencySet => "InvalidFrequencySet",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::DuplicateNodes(..) => "DuplicateNodes",
            Error::SingularMatrix => "SingularMatrix",
            Error::SingularCell { .. } => "SingularCell",
            Error::NonUniformShifts => "NonUniformShifts",
            Error::ShiftOutOfRange { .. } => "ShiftOutOfRange",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NoPairFound { .. } => "NoPairFound",
        }
    }

    /// Failures of the mathematics rather than of the input.
    pub fn is_mathematical(&self) -> bool {
        matches!(
            self,
            Error::DuplicateNodes(..)
                | Error::SingularMatrix
                | Error::SingularCell { .. }
                | Error::NonUniformShifts
                | Error::NoPairFound { .. }
        )
    }
}
