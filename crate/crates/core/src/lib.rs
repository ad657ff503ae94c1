//! Integer-lattice computations for semiabelian degenerations: toric
//! additivity verdicts, component groups, monodromy along traits, and a
//! synthesized Tate-module oracle.
//!
//! The [`lattice`] layer is generic over the scalar type. Everything above
//! it works with the arbitrary-precision aliases defined here.

pub mod curves;
pub mod degeneration;
pub mod error;
pub mod galois;
pub mod generate;
pub mod lattice;
pub mod monodromy;
pub mod neron;
pub mod scalar;

pub use error::{Error, Result};

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::BigRational;
pub type IntMatrix = lattice::Matrix<Int>;
pub type RatMatrix = lattice::Matrix<Rat>;
pub type Group = lattice::FinAb<Int>;
pub type Snf = lattice::SmithDecomposition<Int>;
pub type IndexValue = lattice::Index<Int>;
