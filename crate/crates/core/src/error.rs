use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^H| = {0:e})")]
    NonHermitianInput(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("dimension {0} exceeds the supported maximum of {max}", max = crate::numerics::MAX_DIM)]
    DimensionTooLarge(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigenvalue computation did not converge")]
    EigenFailure,

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("not a probability vector: {0}")]
    NotProbabilityVector(String),

    #[error("completeness sum {sum} at n = {n} exceeds 1")]
    OvercompleteChannel { n: usize, sum: f64 },

    #[error("Kraus operator with shift {shift} has a nonzero coefficient at n = {n} outside the window 0..{dim}")]
    ShiftOutOfRange { shift: i64, n: usize, dim: usize },

    #[error("shift set is empty")]
    EmptyShiftSet,

    #[error("no shift in the set keeps n = {0} inside the window")]
    NoAdmissibleShift(usize),

    #[error("outcome group {0} holds more than one Kraus operator")]
    MixedOutcomeGroup(usize),

    #[error("channel is not trace preserving")]
    NotTracePreserving,

    #[error("k = {k} is outside 2..={max}")]
    BadK { k: usize, max: usize },

    #[error("measure {0} requires a parameter k")]
    MissingK(&'static str),

    #[error("expected a {expected}-dimensional input, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("probability {0} is outside [0, 1]")]
    BadProbability(f64),

    #[error("mixing matrix does not have orthonormal columns (deviation {0:e})")]
    NotIsometry(f64),

    #[error("mixing matrix has {got} columns but the state has rank {rank}")]
    RankMismatch { rank: usize, got: usize },

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
