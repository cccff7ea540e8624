use thiserror::Error;

/// Errors raised by state construction and the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subset mask is empty")]
    EmptySubset,

    #[error("subset mask {mask:#b} does not fit {parties} parties")]
    MaskOutOfRange { mask: u32, parties: usize },

    #[error("party count {0} outside the supported range 1..=16")]
    TooManyParties(usize),

    #[error("local dimension {0} is not supported")]
    BadDimension(usize),

    #[error("total dimension {0} exceeds the cap of 4096")]
    DimensionTooLarge(usize),

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {0}x{1}")]
    NotSquare(usize, usize),

    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("trace is not 1 (got {0})")]
    NotNormalized(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("a pure state is required")]
    PureStateRequired,

    #[error("all local dimensions must be equal")]
    UnequalDims,

    #[error("expected {expected} parties, found {found}")]
    WrongPartyCount { expected: usize, found: usize },

    #[error("weight matrix is not symmetric (deviation {0:e})")]
    AsymmetricWeights(f64),

    #[error("weights must be nonnegative with zero diagonal and unit sum")]
    InvalidWeights,

    #[error("search needs at least one trial")]
    NoTrials,

    #[error("channel diagonal entry {0} outside [0, 1]")]
    InvalidChannel(f64),

    #[error("inconsistent vector lengths: expected {expected}, found {found}")]
    InconsistentVectors { expected: usize, found: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
