use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("subgroup closure exceeded the cap of {0} elements")]
    CapExceeded(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("{0} is not prime (or is too large for byte-sized residues)")]
    NotPrime(u32),
    #[error("matrix is not unipotent")]
    NotUnipotent,
    #[error("subgroup is not normal: {0}")]
    NotNormal(String),
    #[error("section is not abelian")]
    NotAbelianSection,
    #[error("generator at {0} is not a normal subgroup")]
    NonNormalGenerator(String),
    #[error("generator map is not order-reversing between {0} and {1}")]
    NotOrderReversing(String, String),
    #[error("generator domain is not closed under divisibility: {0} is missing")]
    NotDownClosed(String),
    #[error("filter has no nontrivial graded component to refine")]
    NoNontrivialComponent,
    #[error("missing graded component at {0}")]
    MissingComponent(String),
    #[error("subspace is not closed under multiplication")]
    ClosureViolation,
    #[error("ring check failed: {0}")]
    InvalidRing(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
