//! Problem instances and per-point derived quantities.
//!
//! Indices are 0-based here; renderers shift them to 1-based.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{norm_sq, sub, MatQ, VecQ};
use crate::rat::Rat;

/// `min ||x||_0` subject to `||y - A x||_2 <= epsilon` and `B x <= b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance {
    a: MatQ,
    b_mat: MatQ,
    y: VecQ,
    b: VecQ,
    epsilon: Rat,
    epsilon_sq: Rat,
}

impl ProblemInstance {
    /// Validates shapes and `epsilon >= 0`. `b_mat` may have zero rows.
    pub fn new(a: MatQ, b_mat: MatQ, y: VecQ, b: VecQ, epsilon: Rat) -> Result<Self> {
        if a.rows() == 0 || a.cols() == 0 {
            return Err(Error::Dimension(format!(
                "A must be at least 1x1, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b_mat.cols() != a.cols() {
            return Err(Error::Dimension(format!(
                "B has {} columns, A has {}",
                b_mat.cols(),
                a.cols()
            )));
        }
        if y.len() != a.rows() {
            return Err(Error::Dimension(format!("y has length {}, expected {}", y.len(), a.rows())));
        }
        if b.len() != b_mat.rows() {
            return Err(Error::Dimension(format!("b has length {}, expected {}", b.len(), b_mat.rows())));
        }
        if epsilon.is_negative() {
            return Err(Error::NegativeEpsilon);
        }
        let epsilon_sq = &epsilon * &epsilon;
        Ok(ProblemInstance { a, b_mat, y, b, epsilon, epsilon_sq })
    }

    pub fn a(&self) -> &MatQ {
        &self.a
    }

    pub fn b_mat(&self) -> &MatQ {
        &self.b_mat
    }

    pub fn y(&self) -> &[Rat] {
        &self.y
    }

    pub fn b(&self) -> &[Rat] {
        &self.b
    }

    pub fn epsilon(&self) -> &Rat {
        &self.epsilon
    }

    pub fn epsilon_sq(&self) -> &Rat {
        &self.epsilon_sq
    }

    /// Rows of `A` (and length of `y`).
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    /// Number of unknowns.
    pub fn n(&self) -> usize {
        self.a.cols()
    }

    /// Rows of `B`.
    pub fn l(&self) -> usize {
        self.b_mat.rows()
    }

    pub fn residual_sq(&self, x: &[Rat]) -> Rat {
        norm_sq(&sub(&self.y, &self.a.mul_vec(x)))
    }

    /// Exact membership test for the feasible set.
    pub fn is_feasible(&self, x: &[Rat]) -> bool {
        assert_eq!(x.len(), self.n(), "point has wrong length");
        self.residual_sq(x) <= self.epsilon_sq
            && self.b_mat.mul_vec(x).iter().zip(&self.b).all(|(l, r)| l <= r)
    }

    /// Builds the record for a feasible point.
    pub fn make_record(&self, x: &[Rat]) -> Result<SolutionRecord> {
        if x.len() != self.n() {
            return Err(Error::Dimension(format!("point has length {}, expected {}", x.len(), self.n())));
        }
        if !self.is_feasible(x) {
            return Err(Error::InfeasiblePoint);
        }
        let support = support_of(x);
        let bx = self.b_mat.mul_vec(x);
        let active_set = bx
            .iter()
            .zip(&self.b)
            .enumerate()
            .filter(|(_, (l, r))| l == r)
            .map(|(j, _)| j)
            .collect();
        let residual_sq = self.residual_sq(x);
        let strict_interior = residual_sq < self.epsilon_sq;
        Ok(SolutionRecord { x: x.to_vec(), support, active_set, residual_sq, strict_interior })
    }

    /// Embeds a vector indexed by `support` into `R^n`.
    pub fn embed(&self, support: &[usize], z: &[Rat]) -> VecQ {
        let mut x = alloc::vec![Rat::zero(); self.n()];
        for (&i, v) in support.iter().zip(z) {
            x[i] = v.clone();
        }
        x
    }
}

pub fn support_of(x: &[Rat]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, _)| i)
        .collect()
}

/// Complement of a sorted index set within `0..len`.
pub fn complement(set: &[usize], len: usize) -> Vec<usize> {
    (0..len).filter(|i| set.binary_search(i).is_err()).collect()
}

/// A feasible point with its support, active rows and residual.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionRecord {
    pub x: VecQ,
    /// `{i : x_i != 0}`, sorted.
    pub support: Vec<usize>,
    /// `{j : (B x)_j = b_j}`, sorted.
    pub active_set: Vec<usize>,
    /// `||y - A x||^2`.
    pub residual_sq: Rat,
    /// `residual_sq < epsilon^2`.
    pub strict_interior: bool,
}

impl SolutionRecord {
    pub fn inactive_set(&self, l: usize) -> Vec<usize> {
        complement(&self.active_set, l)
    }
}
