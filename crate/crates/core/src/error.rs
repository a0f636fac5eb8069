use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("epsilon {eps} is not a quadratic non-residue modulo {p}")]
    EpsilonNotNonResidue { p: u64, eps: i64 },
    #[error("element has negative valuation")]
    NegativeValuation,
    #[error("columns are linearly dependent")]
    RankDeficient,
    #[error("vector is not in the span of the lattice")]
    NotInSpan,
    #[error("second lattice is not contained in the first")]
    NotContained,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gram matrix is not conjugate-symmetric")]
    NotHermitian,
    #[error("matrix is singular")]
    Singular,
    #[error("lattice is not a vertex")]
    NotAVertex,
    #[error("fundamental matrix is singular")]
    SingularT,
    #[error("fundamental matrix is not integral")]
    NonIntegralT,
    #[error("expected valuation {expected}, found {found}")]
    WrongValuation { expected: i64, found: i64 },
    #[error("vertex is not of maximal type")]
    NotMaximalType,
    #[error("cap exceeded: {what} > {limit}")]
    CapExceeded { what: String, limit: usize },
    #[error("required precision p^{needed} exceeds the machine-word limit p^{max}")]
    PrecisionExceeded { needed: u32, max: u32 },
    #[error("seed vertex failed certification: {0}")]
    SeedFailure(String),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("zero vector")]
    ZeroVector,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("lattices live in different spaces")]
    SpaceMismatch,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = core::result::Result<T, Error>;
