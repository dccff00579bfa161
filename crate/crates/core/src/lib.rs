//! Exact analysis of the sparsest solutions of
//!
//! ```text
//! min ||x||_0  subject to  ||y - A x||_2 <= epsilon,  B x <= b
//! ```
//!
//! over the rationals. The crate enumerates sparsest solutions, checks the
//! rank conditions every sparsest solution must satisfy, decides when a
//! sparsest solution sits inside an infinite family of sparsest solutions
//! with the same support (and builds that family), and checks sufficient
//! conditions for the solution set to be bounded.
//!
//! All decisions are exact; floats appear only in rendered output.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod conditions;
pub mod enumerate;
pub mod error;
pub mod family;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod qp;
pub mod rat;

pub use error::{Error, Result};
pub use linalg::{MatQ, VecQ};
pub use model::{ProblemInstance, SolutionRecord};
pub use rat::Rat;

/// Caps on combinatorial work.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Total supports (or column subsets) examined by one enumeration.
    pub max_supports: u64,
    /// Row subsets tried per restricted least-squares problem.
    pub max_active_subsets: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_supports: 1_000_000, max_active_subsets: 1_000_000 }
    }
}
