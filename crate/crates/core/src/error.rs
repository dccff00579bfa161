use alloc::string::String;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("epsilon must be nonnegative")]
    NegativeEpsilon,
    #[error("point is not feasible")]
    InfeasiblePoint,
    #[error("point is feasible but not a sparsest solution (support size {support} > optimum {kstar})")]
    NotSparsest { support: usize, kstar: usize },
    #[error("restricted polyhedron is empty")]
    EmptyPolyhedron,
    #[error("no feasible support of size <= {kcap}")]
    NoSolutionWithinCap { kcap: usize },
    #[error("work cap exceeded: {what} needs {needed} units, cap is {cap}")]
    WorkCapExceeded { what: &'static str, needed: u128, cap: u64 },
    #[error("direction rejected for {condition}: {reason}")]
    InvalidDirection { condition: &'static str, reason: &'static str },
    #[error("family member at lambda = {lambda} failed exact verification")]
    VerificationFailure { lambda: Rat },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
