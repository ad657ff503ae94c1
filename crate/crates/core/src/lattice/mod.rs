//! Exact linear algebra over the integers.

mod group;
mod hermite;
mod matrix;
mod ops;
mod snf;

pub use group::FinAb;
pub use hermite::{column_basis, row_hermite_form};
pub use matrix::{Lattice, LatticeMap, Matrix};
pub use ops::{
    cokernel, image_basis, index_of, is_injective, is_surjective, is_unimodular, kernel_saturated,
    lattice_sum, rank, same_span, saturation, solve_integral, solve_rational, sublattice_quotient,
    to_integral, to_rational, torsion_kernel_qz, Index,
};
pub use snf::{smith_normal_form, SmithDecomposition};
