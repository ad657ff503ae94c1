use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::IntScalar;

use super::group::FinAb;
use super::hermite::column_basis;
use super::matrix::Matrix;
use super::snf::smith_normal_form;

/// Index of a sublattice in its ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Index<T> {
    Finite(T),
    Infinite,
}

impl<T: IntScalar> Index<T> {
    pub fn is_one(&self) -> bool {
        matches!(self, Index::Finite(v) if v.is_one())
    }

    /// Finite and not divisible by `l`.
    pub fn coprime_to(&self, l: &T) -> bool {
        matches!(self, Index::Finite(v) if !v.is_multiple_of(l))
    }
}

impl<T: IntScalar> fmt::Display for Index<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Finite(v) => write!(f, "{v}"),
            Index::Infinite => write!(f, "infinite"),
        }
    }
}

pub fn rank<T: IntScalar>(m: &Matrix<T>) -> usize {
    smith_normal_form(m).rank
}

pub fn is_injective<T: IntScalar>(m: &Matrix<T>) -> bool {
    rank(m) == m.ncols()
}

/// Surjective over the integers: full row rank and every invariant factor 1.
pub fn is_surjective<T: IntScalar>(m: &Matrix<T>) -> bool {
    let s = smith_normal_form(m);
    s.rank == m.nrows() && s.invariant_factors().iter().all(|d| d.is_one())
}

pub fn is_unimodular<T: IntScalar>(m: &Matrix<T>) -> bool {
    m.is_square() && is_surjective(m)
}

/// `coker M = Z^rows / im M` as torsion part plus free rank.
pub fn cokernel<T: IntScalar>(m: &Matrix<T>) -> (FinAb<T>, usize) {
    let s = smith_normal_form(m);
    (FinAb::from_orders(s.torsion_factors()), m.nrows() - s.rank)
}

/// `ker(M tensor Q/Z)`: a copy of `Z/d` for each invariant factor `d > 1`
/// and one `Q/Z` per dimension of the rational kernel.
pub fn torsion_kernel_qz<T: IntScalar>(m: &Matrix<T>) -> FinAb<T> {
    let s = smith_normal_form(m);
    FinAb::from_orders(s.torsion_factors()).with_divisible_rank(m.ncols() - s.rank)
}

/// Basis (as columns, Hermite-normalized) of `{x : Mx = 0}`. The result is
/// injective and its image is saturated.
pub fn kernel_saturated<T: IntScalar>(m: &Matrix<T>) -> Matrix<T> {
    let s = smith_normal_form(m);
    let free = s.right.select_cols(s.rank..m.ncols());
    column_basis(&free)
}

/// Canonical basis of the column span.
pub fn image_basis<T: IntScalar>(m: &Matrix<T>) -> Matrix<T> {
    column_basis(m)
}

/// Canonical basis of the saturation of the column span.
pub fn saturation<T: IntScalar>(m: &Matrix<T>) -> Matrix<T> {
    let s = smith_normal_form(m);
    column_basis(&s.left_inverse.select_cols(0..s.rank))
}

/// Index of the column span of `m` in `Z^rows`.
pub fn index_of<T: IntScalar>(m: &Matrix<T>) -> Index<T> {
    let s = smith_normal_form(m);
    if s.rank < m.nrows() {
        return Index::Infinite;
    }
    Index::Finite(
        s.invariant_factors()
            .into_iter()
            .fold(T::one(), |a, d| a * d),
    )
}

/// Sum of the images of `maps` (all with `target` rows). Returns a
/// saturated basis of the sum together with the index of the unsaturated
/// sum in the target.
pub fn lattice_sum<T: IntScalar>(
    maps: &[Matrix<T>],
    target: usize,
) -> Result<(Matrix<T>, Index<T>)> {
    let all = Matrix::hstack(maps, target)?;
    Ok((saturation(&all), index_of(&all)))
}

/// True when the column spans agree as sublattices.
pub fn same_span<T: IntScalar>(a: &Matrix<T>, b: &Matrix<T>) -> bool {
    a.nrows() == b.nrows() && column_basis(a) == column_basis(b)
}

/// Some integral `X` with `A X = B`, free coordinates set to zero.
pub fn solve_integral<T: IntScalar>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>> {
    if a.nrows() != b.nrows() {
        return Err(Error::Shape(format!(
            "solve: {} rows against {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let s = smith_normal_form(a);
    let ub = s.left.checked_mul(b)?;
    let mut y = Matrix::zeros(a.ncols(), b.ncols());
    for i in 0..a.nrows() {
        for j in 0..b.ncols() {
            let v = &ub[(i, j)];
            if i < s.rank {
                let d = &s.diagonal[(i, i)];
                if !v.is_multiple_of(d) {
                    return Err(Error::NoSolution(format!(
                        "entry ({i}, {j}) is not divisible by {d}"
                    )));
                }
                y[(i, j)] = v.clone() / d.clone();
            } else if !v.is_zero() {
                return Err(Error::NoSolution("right-hand side leaves the image".into()));
            }
        }
    }
    s.right.checked_mul(&y)
}

/// Some rational `X` with `A X = B`, free coordinates set to zero.
pub fn solve_rational<T: IntScalar>(
    a: &Matrix<Ratio<T>>,
    b: &Matrix<Ratio<T>>,
) -> Result<Matrix<Ratio<T>>> {
    if a.nrows() != b.nrows() {
        return Err(Error::Shape(format!(
            "solve: {} rows against {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let (rows, n, k) = (a.nrows(), a.ncols(), b.ncols());
    let mut aug = Matrix::hstack(&[a.clone(), b.clone()], rows)?;
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows).find(|&i| !aug[(i, c)].is_zero()) else {
            continue;
        };
        aug.swap_rows(r, p);
        let inv = Ratio::one() / aug[(r, c)].clone();
        for j in 0..n + k {
            aug[(r, j)] = aug[(r, j)].clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !aug[(i, c)].is_zero() {
                let f = Ratio::zero() - aug[(i, c)].clone();
                aug.add_row_multiple(i, r, &f);
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..rows).any(|i| (n..n + k).any(|j| !aug[(i, j)].is_zero())) {
        return Err(Error::NoSolution("inconsistent rational system".into()));
    }
    let mut x = Matrix::zeros(n, k);
    for (i, &c) in pivots.iter().enumerate() {
        for j in 0..k {
            x[(c, j)] = aug[(i, n + j)].clone();
        }
    }
    Ok(x)
}

pub fn to_rational<T: IntScalar>(m: &Matrix<T>) -> Matrix<Ratio<T>> {
    m.map(|e| Ratio::from_integer(e.clone()))
}

/// The integer matrix equal to `m`, if every entry is integral.
pub fn to_integral<T: IntScalar>(m: &Matrix<Ratio<T>>) -> Option<Matrix<T>> {
    m.entries()
        .all(|e| e.is_integer())
        .then(|| m.map(|e| e.to_integer()))
}

/// `L / K` where the columns of `l` are a basis of `L` and the columns of
/// `k` generate a sublattice `K` of `L`.
pub fn sublattice_quotient<T: IntScalar>(
    l: &Matrix<T>,
    k: &Matrix<T>,
) -> Result<(FinAb<T>, usize)> {
    if !is_injective(l) {
        return Err(Error::NotInjective(
            "ambient basis is not linearly independent".into(),
        ));
    }
    let coords = solve_integral(l, k)?;
    Ok(cokernel(&coords))
}
