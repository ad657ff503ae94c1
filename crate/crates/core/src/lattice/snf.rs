use crate::scalar::IntScalar;

use super::matrix::Matrix;

/// `U * M * V = D` with `U`, `V` unimodular and `D` diagonal,
/// `d_1 | d_2 | ... | d_rank`, all non-negative.
///
/// The inverses of `U` and `V` are accumulated alongside, so callers that
/// need a basis of the image (`U^-1` columns) or coordinates in the source
/// (`V^-1`) never have to invert anything.
#[derive(Clone, PartialEq)]
pub struct SmithDecomposition<T> {
    pub left: Matrix<T>,
    pub diagonal: Matrix<T>,
    pub right: Matrix<T>,
    pub left_inverse: Matrix<T>,
    pub right_inverse: Matrix<T>,
    pub rank: usize,
}

impl<T: std::fmt::Display> std::fmt::Debug for SmithDecomposition<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmithDecomposition")
            .field("left", &self.left)
            .field("diagonal", &self.diagonal)
            .field("right", &self.right)
            .field("rank", &self.rank)
            .finish()
    }
}

impl<T: IntScalar> SmithDecomposition<T> {
    /// The non-zero diagonal entries `d_1 | ... | d_rank`.
    pub fn invariant_factors(&self) -> Vec<T> {
        (0..self.rank)
            .map(|k| self.diagonal[(k, k)].clone())
            .collect()
    }

    /// Invariant factors different from one.
    pub fn torsion_factors(&self) -> Vec<T> {
        self.invariant_factors()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect()
    }
}

struct Reducer<T> {
    d: Matrix<T>,
    u: Matrix<T>,
    u_inv: Matrix<T>,
    v: Matrix<T>,
    v_inv: Matrix<T>,
}

impl<T: IntScalar> Reducer<T> {
    fn swap_rows(&mut self, a: usize, b: usize) {
        self.d.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.d.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }

    /// `row[t] += c * row[s]`
    fn row_op(&mut self, t: usize, s: usize, c: &T) {
        self.d.add_row_multiple(t, s, c);
        self.u.add_row_multiple(t, s, c);
        self.u_inv.add_col_multiple(s, t, &(T::zero() - c.clone()));
    }

    /// `col[t] += c * col[s]`
    fn col_op(&mut self, t: usize, s: usize, c: &T) {
        self.d.add_col_multiple(t, s, c);
        self.v.add_col_multiple(t, s, c);
        self.v_inv.add_row_multiple(s, t, &(T::zero() - c.clone()));
    }

    fn negate_row(&mut self, i: usize) {
        self.d.negate_row(i);
        self.u.negate_row(i);
        self.u_inv.negate_col(i);
    }

    /// Position of the smallest non-zero `|entry|` in the lower-right block
    /// starting at `(t, t)`.
    fn smallest_pivot(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize, T)> = None;
        for i in t..self.d.nrows() {
            for j in t..self.d.ncols() {
                let a = self.d[(i, j)].abs();
                if a.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(_, _, b)| a < *b) {
                    best = Some((i, j, a));
                }
            }
        }
        best.map(|(i, j, _)| (i, j))
    }
}

/// Smith normal form over the integers.
///
/// Pivots are always the smallest non-zero entry of the remaining block,
/// which keeps intermediate growth small at the cost of a quadratic scan per
/// step.
pub fn smith_normal_form<T: IntScalar>(m: &Matrix<T>) -> SmithDecomposition<T> {
    let (rows, cols) = (m.nrows(), m.ncols());
    let mut r = Reducer {
        d: m.clone(),
        u: Matrix::identity(rows),
        u_inv: Matrix::identity(rows),
        v: Matrix::identity(cols),
        v_inv: Matrix::identity(cols),
    };
    let mut rank = 0;
    for t in 0..rows.min(cols) {
        let Some((pi, pj)) = r.smallest_pivot(t) else {
            break;
        };
        r.swap_rows(t, pi);
        r.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if r.d[(i, t)].is_zero() {
                    continue;
                }
                let q = r.d[(i, t)].div_floor(&r.d[(t, t)]);
                r.row_op(i, t, &(T::zero() - q));
                if !r.d[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if r.d[(t, j)].is_zero() {
                    continue;
                }
                let q = r.d[(t, j)].div_floor(&r.d[(t, t)]);
                r.col_op(j, t, &(T::zero() - q));
                if !r.d[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A remainder is now smaller than the pivot; move it in.
                let (pi, pj) = r.smallest_in_cross(t);
                r.swap_rows(t, pi);
                r.swap_cols(t, pj);
                continue;
            }
            // Row and column are clear; enforce divisibility of the rest.
            let pivot = r.d[(t, t)].clone();
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !r.d[(i, j)].is_multiple_of(&pivot));
            match offender {
                Some((i, _)) => r.row_op(t, i, &T::one()),
                None => break,
            }
        }
        if r.d[(t, t)].is_negative() {
            r.negate_row(t);
        }
        rank = t + 1;
    }
    SmithDecomposition {
        left: r.u,
        diagonal: r.d,
        right: r.v,
        left_inverse: r.u_inv,
        right_inverse: r.v_inv,
        rank,
    }
}

impl<T: IntScalar> Reducer<T> {
    /// Smallest non-zero entry on row `t` or column `t` (pivot included).
    fn smallest_in_cross(&self, t: usize) -> (usize, usize) {
        let mut best = (t, t, self.d[(t, t)].abs());
        for i in t + 1..self.d.nrows() {
            let a = self.d[(i, t)].abs();
            if !a.is_zero() && a < best.2 {
                best = (i, t, a);
            }
        }
        for j in t + 1..self.d.ncols() {
            let a = self.d[(t, j)].abs();
            if !a.is_zero() && a < best.2 {
                best = (t, j, a);
            }
        }
        (best.0, best.1)
    }
}
