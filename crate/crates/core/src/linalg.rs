//! Dense exact matrix kernels over the rationals.
//!
//! Everything here is exact; there are no tolerances. Rank, null spaces and
//! least-squares minimizers are decided by rational Gauss-Jordan elimination.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::rat::{primitive_normalized, Rat};

/// Exact rational vector.
pub type VecQ = Vec<Rat>;

/// Dense row-major rational matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MatQ {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl fmt::Debug for MatQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MatQ {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            if r > 0 {
                f.write_str("; ")?;
            }
            for (c, x) in self.row(r).iter().enumerate() {
                if c > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{x}")?;
            }
        }
        f.write_str("]")
    }
}

impl MatQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatQ { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rat::one();
        }
        m
    }

    /// Builds from a row-major buffer. Panics if the length is not `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Rat>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix buffer has wrong length");
        MatQ { rows, cols, data }
    }

    /// Builds from explicit rows; `cols` is needed so that a 0-row matrix
    /// still knows its width. Panics on ragged input.
    pub fn from_rows(cols: usize, rows: &[Vec<Rat>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix rows");
            data.extend(r.iter().cloned());
        }
        MatQ { rows: rows.len(), cols, data }
    }

    pub fn from_i64(rows: usize, cols: usize, entries: &[i64]) -> Self {
        Self::from_vec(rows, cols, entries.iter().map(|&x| crate::rat::int(x)).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Rat] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> VecQ {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t[(c, r)] = self[(r, c)].clone();
            }
        }
        t
    }

    /// Columns in the given order.
    pub fn select_cols(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            for &c in cols {
                data.push(self[(r, c)].clone());
            }
        }
        MatQ { rows: self.rows, cols: cols.len(), data }
    }

    /// Rows in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend(self.row(r).iter().cloned());
        }
        MatQ { rows: rows.len(), cols: self.cols, data }
    }

    /// Stacks `self` over `below`. Panics if the widths differ.
    pub fn vstack(&self, below: &MatQ) -> Self {
        assert_eq!(self.cols, below.cols, "vstack width mismatch");
        let mut data = self.data.clone();
        data.extend(below.data.iter().cloned());
        MatQ { rows: self.rows + below.rows, cols: self.cols, data }
    }

    pub fn neg(&self) -> Self {
        MatQ {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rat]) -> VecQ {
        assert_eq!(v.len(), self.cols, "matrix-vector shape mismatch");
        (0..self.rows).map(|r| dot(self.row(r), v)).collect()
    }

    pub fn mul(&self, rhs: &MatQ) -> MatQ {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = MatQ::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..rhs.cols {
                    out[(r, c)] += a * &rhs[(k, c)];
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }
}

impl core::ops::Index<(usize, usize)> for MatQ {
    type Output = Rat;
    fn index(&self, (r, c): (usize, usize)) -> &Rat {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for MatQ {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Rat {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rat::zero(), |acc, (x, y)| acc + x * y)
}

pub fn norm_sq(v: &[Rat]) -> Rat {
    dot(v, v)
}

pub fn sub(a: &[Rat], b: &[Rat]) -> VecQ {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rat], b: &[Rat]) -> VecQ {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rat], s: &Rat) -> VecQ {
    a.iter().map(|x| x * s).collect()
}

pub fn norm_inf(v: &[Rat]) -> Rat {
    v.iter()
        .map(|x| if *x < Rat::zero() { -x } else { x.clone() })
        .max()
        .unwrap_or_else(Rat::zero)
}

/// Reduced row-echelon form together with its pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rref {
    pub reduced: MatQ,
    pub pivot_columns: Vec<usize>,
    pub rank: usize,
}

/// Gauss-Jordan elimination. The first nonzero entry in a column is taken as
/// the pivot; the output is the unique RREF regardless.
pub fn rref(m: &MatQ) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[(i, c)].is_zero()) else {
            continue;
        };
        if p != r {
            for j in 0..cols {
                a.data.swap(p * cols + j, r * cols + j);
            }
        }
        let inv = a[(r, c)].recip();
        for j in c..cols {
            a[(r, j)] *= &inv;
        }
        for i in 0..rows {
            if i == r || a[(i, c)].is_zero() {
                continue;
            }
            let f = a[(i, c)].clone();
            for j in c..cols {
                let delta = &f * &a[(r, j)];
                a[(i, j)] -= delta;
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref { reduced: a, rank: pivots.len(), pivot_columns: pivots }
}

/// Basis of `{v : M v = 0}`, one column per basis vector, each a primitive
/// integer vector whose first nonzero entry is positive. A trivial null
/// space yields a matrix with zero columns.
pub fn null_space_basis(m: &MatQ) -> MatQ {
    let vectors = null_space_vectors(m);
    let mut out = MatQ::zeros(m.cols, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            out[(i, j)] = x.clone();
        }
    }
    out
}

/// Same basis as [`null_space_basis`], as a list of vectors.
pub fn null_space_vectors(m: &MatQ) -> Vec<VecQ> {
    let Rref { reduced, pivot_columns, .. } = rref(m);
    let mut is_pivot = vec![false; m.cols];
    for &p in &pivot_columns {
        is_pivot[p] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = vec![Rat::zero(); m.cols];
            v[free] = Rat::one();
            for (row, &p) in pivot_columns.iter().enumerate() {
                v[p] = -reduced[(row, free)].clone();
            }
            primitive_normalized(&v)
        })
        .collect()
}

/// General solution `particular + span(kernel)` of `M z = f`, or `None`
/// when the system is inconsistent. The particular solution sets every free
/// variable to zero.
pub fn solve_linear(m: &MatQ, f: &[Rat]) -> Option<(VecQ, Vec<VecQ>)> {
    assert_eq!(m.rows, f.len(), "right-hand side length mismatch");
    let mut aug = MatQ::zeros(m.rows, m.cols + 1);
    for r in 0..m.rows {
        for c in 0..m.cols {
            aug[(r, c)] = m[(r, c)].clone();
        }
        aug[(r, m.cols)] = f[r].clone();
    }
    let Rref { reduced, pivot_columns, .. } = rref(&aug);
    if pivot_columns.last() == Some(&m.cols) {
        return None;
    }
    let mut z = vec![Rat::zero(); m.cols];
    for (row, &p) in pivot_columns.iter().enumerate() {
        z[p] = reduced[(row, m.cols)].clone();
    }
    Some((z, null_space_vectors(m)))
}

/// Minimum-norm solution of a consistent system `C z = g`, or `None` when
/// inconsistent. The minimum-norm point lies in the row space of `C`, so it
/// is `C^T u` for any `u` solving `C C^T u = g`.
pub fn min_norm_solution(c: &MatQ, g: &[Rat]) -> Option<VecQ> {
    solve_linear(c, g)?;
    let ct = c.transpose();
    let gram = c.mul(&ct);
    let (u, _) = solve_linear(&gram, g)?;
    Some(ct.mul_vec(&u))
}

/// Result of [`solve_eq_least_squares`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeastSquares {
    /// Exact minimal value of `||v - M z||^2`.
    pub qstar: Rat,
    /// Minimum-norm minimizer.
    pub z: VecQ,
}

/// `min ||v - M z||^2` subject to `E z = f`, exactly.
///
/// Returns `None` when `E z = f` has no solution. When the minimizer is not
/// unique the one of smallest Euclidean norm is returned.
pub fn solve_eq_least_squares(m: &MatQ, v: &[Rat], e: &MatQ, f: &[Rat]) -> Option<LeastSquares> {
    assert_eq!(m.cols, e.cols, "model and constraint widths differ");
    assert_eq!(m.rows, v.len(), "observation length mismatch");
    let (_, kernel) = solve_linear(e, f)?;
    // Minimizers are exactly {z : E z = f, N^T M^T (M z - v) = 0}, with N
    // spanning Null(E).
    let mt = m.transpose();
    let normal = mt.mul(m);
    let rhs = mt.mul_vec(v);
    let mut rows: Vec<VecQ> = (0..e.rows).map(|r| e.row(r).to_vec()).collect();
    let mut g: VecQ = f.to_vec();
    for n in &kernel {
        let row: VecQ = (0..m.cols)
            .map(|j| dot(n, &normal.column(j)))
            .collect();
        rows.push(row);
        g.push(dot(n, &rhs));
    }
    let system = MatQ::from_rows(m.cols, &rows);
    let z = min_norm_solution(&system, &g)
        .expect("normal equations restricted to a consistent affine set are consistent");
    let residual = sub(v, &m.mul_vec(&z));
    Some(LeastSquares { qstar: norm_sq(&residual), z })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, ratio};
    use alloc::vec;

    fn example_a() -> MatQ {
        MatQ::from_i64(3, 4, &[1, 0, -2, 5, 0, 1, 4, -9, 1, 0, -2, 5])
    }

    fn example_y() -> VecQ {
        vec![int(1), int(-1), int(1)]
    }

    #[test]
    fn rref_identity() {
        let id = MatQ::identity(3);
        let r = rref(&id);
        assert_eq!(r.reduced, id);
        assert_eq!(r.pivot_columns, vec![0, 1, 2]);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn rref_proportional_rows() {
        let m = MatQ::from_i64(2, 2, &[1, 2, 2, 4]);
        let r = rref(&m);
        assert_eq!(r.reduced, MatQ::from_i64(2, 2, &[1, 2, 0, 0]));
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn example_support_34_has_rank_two() {
        let a_s = example_a().select_cols(&[2, 3]);
        assert_eq!(a_s, MatQ::from_i64(3, 2, &[-2, 5, 4, -9, -2, 5]));
        assert_eq!(a_s.rank(), 2);
    }

    #[test]
    fn null_space_of_inactive_row() {
        let m = MatQ::from_i64(1, 2, &[-1, 2]);
        let n = null_space_basis(&m);
        assert_eq!(n, MatQ::from_i64(2, 1, &[2, 1]));
    }

    #[test]
    fn null_space_identity_is_empty() {
        let n = null_space_basis(&MatQ::identity(4));
        assert_eq!((n.rows(), n.cols()), (4, 0));
    }

    #[test]
    fn null_space_example_a() {
        let a = example_a();
        let n = null_space_vectors(&a);
        assert_eq!(n.len(), 2);
        for v in &n {
            assert!(a.mul_vec(v).iter().all(Zero::is_zero));
        }
        // Frozen from hand RREF: pivots on columns 1,2; free columns 3,4.
        assert_eq!(n[0], vec![int(2), int(-4), int(1), int(0)]);
        assert_eq!(n[1], vec![int(5), int(-9), int(0), int(-1)]);
    }

    #[test]
    fn least_squares_exact_fit() {
        let a_s = example_a().select_cols(&[2, 3]);
        let ls = solve_eq_least_squares(&a_s, &example_y(), &MatQ::zeros(0, 2), &[]).unwrap();
        assert_eq!(ls.qstar, int(0));
        assert_eq!(ls.z, vec![int(2), int(1)]);
    }

    #[test]
    fn least_squares_empty_model() {
        let m = MatQ::zeros(3, 0);
        let ls = solve_eq_least_squares(&m, &example_y(), &MatQ::zeros(0, 0), &[]).unwrap();
        assert_eq!(ls.qstar, int(3));
        assert!(ls.z.is_empty());
    }

    #[test]
    fn least_squares_with_forced_row() {
        let a_s = example_a().select_cols(&[1, 2]);
        let e = MatQ::from_i64(1, 2, &[0, 1]);
        let ls = solve_eq_least_squares(&a_s, &example_y(), &e, &[ratio(-1, 2)]).unwrap();
        assert_eq!(ls.qstar, int(0));
        assert_eq!(ls.z, vec![int(1), ratio(-1, 2)]);
    }

    #[test]
    fn least_squares_infeasible_constraints() {
        let e = MatQ::from_i64(2, 1, &[1, 1]);
        let m = MatQ::from_i64(1, 1, &[1]);
        assert!(solve_eq_least_squares(&m, &[int(0)], &e, &[int(0), int(1)]).is_none());
    }

    #[test]
    fn least_squares_min_norm_tiebreak() {
        // z1 + z2 fits y = 2 exactly along a line; min-norm point is (1,1).
        let m = MatQ::from_i64(1, 2, &[1, 1]);
        let ls = solve_eq_least_squares(&m, &[int(2)], &MatQ::zeros(0, 2), &[]).unwrap();
        assert_eq!(ls.z, vec![int(1), int(1)]);
        assert_eq!(ls.qstar, int(0));
    }
}
