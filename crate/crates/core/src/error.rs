use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("prime {0} equals the residue characteristic")]
    PrimeEqualsResidueChar(String),
    #[error("group has a divisible part of rank {0}")]
    DivisiblePart(usize),
    #[error("degenerate pairing: {0}")]
    DegeneratePairing(String),
    #[error("map is not surjective: {0}")]
    NotSurjective(String),
    #[error("map is not injective: {0}")]
    NotInjective(String),
    #[error("not symmetric positive definite: {0}")]
    NotPositiveDefinite(String),
    #[error("profile is not transversal: {0}")]
    NonTransversal(String),
    #[error("Step 5 requires toric additivity")]
    NotToricAdditive,
    #[error("neither dual data nor a polarization is available")]
    NoDualData,
    #[error("invalid datum: {}", .0.join("; "))]
    InvalidDatum(Vec<String>),
    #[error("kummer factor {m} is not coprime to the residue characteristic {p}")]
    WildRescaling { m: String, p: String },
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("no integral solution: {0}")]
    NoSolution(String),
}

pub type Result<T> = std::result::Result<T, Error>;
