use crate::scalar::IntScalar;

use super::matrix::Matrix;

/// Row-style Hermite normal form of the row span of `a`.
///
/// Returns only the non-zero rows: an echelon basis with positive pivots
/// and every entry above a pivot reduced into `[0, pivot)`. Two matrices
/// have the same row lattice iff their forms are equal.
pub fn row_hermite_form<T: IntScalar>(a: &Matrix<T>) -> Matrix<T> {
    let mut a = a.clone();
    let (rows, cols) = (a.nrows(), a.ncols());
    let mut r = 0;
    let mut c = 0;
    while r < rows && c < cols {
        let pivot = (r..rows)
            .filter(|&i| !a[(i, c)].is_zero())
            .min_by(|&x, &y| a[(x, c)].abs().cmp(&a[(y, c)].abs()));
        let Some(p) = pivot else {
            c += 1;
            continue;
        };
        a.swap_rows(r, p);
        let mut dirty = false;
        for k in r + 1..rows {
            if !a[(k, c)].is_zero() {
                let q = a[(k, c)].div_floor(&a[(r, c)]);
                a.add_row_multiple(k, r, &(T::zero() - q));
                dirty |= !a[(k, c)].is_zero();
            }
        }
        if dirty {
            continue;
        }
        if a[(r, c)].is_negative() {
            a.negate_row(r);
        }
        for k in 0..r {
            let q = a[(k, c)].div_floor(&a[(r, c)]);
            if !q.is_zero() {
                a.add_row_multiple(k, r, &(T::zero() - q));
            }
        }
        r += 1;
        c += 1;
    }
    a.select_rows(0..r)
}

/// Canonical basis (as columns) of the sublattice spanned by the columns of
/// `m`.
pub fn column_basis<T: IntScalar>(m: &Matrix<T>) -> Matrix<T> {
    row_hermite_form(&m.transpose()).transpose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type M = Matrix<BigInt>;

    #[test]
    fn same_lattice_same_form() {
        let a = M::from_i64_rows(&[&[2, 0], &[0, 1]]);
        let b = M::from_i64_rows(&[&[2, 2], &[0, 1]]);
        assert_eq!(column_basis(&a), column_basis(&b));
        let c = M::from_i64_rows(&[&[1, 0], &[0, 1]]);
        assert_ne!(column_basis(&a), column_basis(&c));
    }

    #[test]
    fn drops_dependent_generators() {
        let a = M::from_i64_rows(&[&[1, 2, 3], &[1, 2, 3]]);
        let h = column_basis(&a);
        assert_eq!(h, M::from_i64_rows(&[&[1], &[1]]));
        assert_eq!(column_basis(&M::zeros(2, 0)).ncols(), 0);
    }
}
