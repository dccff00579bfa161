//! Exact minimization of the residual over a support, with inequality rows.
//!
//! `min ||y - A_S z||^2` subject to `B_{I,S} z = b_I` and `B_S z <= b` is
//! solved by trying every set of rows `W ⊇ I` as equalities. Some `W` is the
//! active set of an optimal face, and the minimum-norm minimizer for that
//! `W` lies in the face, so the best feasible candidate is a true optimum.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::linalg::{solve_eq_least_squares, VecQ};
use crate::model::ProblemInstance;
use crate::rat::Rat;
use crate::Limits;

/// Support `S` and rows `I` forced to hold with equality, both 0-based and
/// sorted.
#[derive(Clone, Copy, Debug)]
pub struct RestrictedProblem<'a> {
    pub instance: &'a ProblemInstance,
    pub support: &'a [usize],
    pub forced_active: &'a [usize],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictedResult {
    pub qstar: Rat,
    /// Minimizer over the support coordinates.
    pub witness: VecQ,
    /// Rows of `B` that are tight at the witness.
    pub active_rows_at_witness: Vec<usize>,
}

/// One equality-constrained least-squares solve for a row set `W`.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub rows: Vec<usize>,
    pub qstar: Rat,
    pub z: VecQ,
}

/// Every `W ⊇ I` whose equality-constrained minimizer also satisfies the
/// remaining inequalities, in increasing bitmask order of the free rows.
pub fn feasible_candidates(p: &RestrictedProblem<'_>, limits: &Limits) -> Result<Vec<Candidate>> {
    let inst = p.instance;
    let l = inst.l();
    let free: Vec<usize> = (0..l).filter(|j| p.forced_active.binary_search(j).is_err()).collect();
    let subsets = 1u128 << free.len();
    if free.len() >= 64 || subsets > u128::from(limits.max_active_subsets) {
        return Err(Error::WorkCapExceeded {
            what: "active-set subsets",
            needed: subsets,
            cap: limits.max_active_subsets,
        });
    }
    let a_s = inst.a().select_cols(p.support);
    let b_s = inst.b_mat().select_cols(p.support);
    let mut out = Vec::new();
    for mask in 0..(1u64 << free.len()) {
        let mut rows: Vec<usize> = p.forced_active.to_vec();
        rows.extend(free.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &j)| j));
        rows.sort_unstable();
        let e = b_s.select_rows(&rows);
        let f: VecQ = rows.iter().map(|&j| inst.b()[j].clone()).collect();
        let Some(ls) = solve_eq_least_squares(&a_s, inst.y(), &e, &f) else {
            continue;
        };
        let bz = b_s.mul_vec(&ls.z);
        if bz.iter().zip(inst.b()).all(|(lhs, rhs)| lhs <= rhs) {
            out.push(Candidate { rows, qstar: ls.qstar, z: ls.z });
        }
    }
    Ok(out)
}

/// Smallest residual first, then lexicographically smallest row set.
fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    a.qstar.cmp(&b.qstar).then_with(|| a.rows.cmp(&b.rows))
}

/// Exact minimal squared residual over the restricted polyhedron.
pub fn min_residual(p: &RestrictedProblem<'_>, limits: &Limits) -> Result<RestrictedResult> {
    let best = feasible_candidates(p, limits)?
        .into_iter()
        .min_by(candidate_order)
        .ok_or(Error::EmptyPolyhedron)?;
    let inst = p.instance;
    let b_s = inst.b_mat().select_cols(p.support);
    let active = b_s
        .mul_vec(&best.z)
        .iter()
        .zip(inst.b())
        .enumerate()
        .filter(|(_, (lhs, rhs))| lhs == rhs)
        .map(|(j, _)| j)
        .collect();
    Ok(RestrictedResult { qstar: best.qstar, witness: best.z, active_rows_at_witness: active })
}

/// Whether some point supported within `S` is feasible; the witness is the
/// minimizer embedded into `R^n`.
pub fn support_feasible(inst: &ProblemInstance, support: &[usize], limits: &Limits) -> Result<Option<VecQ>> {
    let p = RestrictedProblem { instance: inst, support, forced_active: &[] };
    match min_residual(&p, limits) {
        Ok(r) if r.qstar <= *inst.epsilon_sq() => Ok(Some(inst.embed(support, &r.witness))),
        Ok(_) | Err(Error::EmptyPolyhedron) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Whether `{z : ||y - A_S z||^2 <= eps^2, B_{I,S} z = b_I, B_S z <= b}` is
/// nonempty.
pub fn region_nonempty(inst: &ProblemInstance, support: &[usize], forced: &[usize], limits: &Limits) -> Result<bool> {
    let p = RestrictedProblem { instance: inst, support, forced_active: forced };
    match min_residual(&p, limits) {
        Ok(r) => Ok(r.qstar <= *inst.epsilon_sq()),
        Err(Error::EmptyPolyhedron) => Ok(false),
        Err(e) => Err(e),
    }
}
