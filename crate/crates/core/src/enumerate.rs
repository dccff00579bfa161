//! Brute-force sparsest-solution oracle.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::model::{ProblemInstance, SolutionRecord};
use crate::qp::{feasible_candidates, support_feasible, RestrictedProblem};
use crate::rat::Rat;
use crate::Limits;

/// Lexicographic `k`-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations { n, current: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

/// `C(n, k)`, saturating.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul((n - i) as u128) / (i as u128 + 1))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkCounters {
    pub supports_examined: u64,
    pub active_set_solves: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationResult {
    /// Optimal value of the problem.
    pub kstar: usize,
    /// Every feasible support of size `kstar`, sorted.
    pub optimal_supports: Vec<Vec<usize>>,
    /// One exact witness per optimal support.
    pub witnesses: BTreeMap<Vec<usize>, SolutionRecord>,
    /// Largest active-set size over all sparsest solutions.
    pub max_active_cardinality: usize,
    pub max_active_witness: SolutionRecord,
    /// Smallest nonzero magnitude among the stored witnesses. Only a bound on
    /// those witnesses, not on every sparsest solution.
    pub empirical_gamma: Option<Rat>,
    pub work: WorkCounters,
}

/// Tests supports of size `0, 1, ..., kcap` in order and stops at the first
/// size with a feasible support.
pub fn enumerate_sparsest(inst: &ProblemInstance, kcap: usize, limits: &Limits) -> Result<EnumerationResult> {
    let n = inst.n();
    let kcap = kcap.min(n);
    let subsets = 1u128 << inst.l().min(100);
    if subsets > u128::from(limits.max_active_subsets) {
        return Err(Error::WorkCapExceeded {
            what: "active-set subsets",
            needed: subsets,
            cap: limits.max_active_subsets,
        });
    }
    let mut work = WorkCounters::default();
    for k in 0..=kcap {
        let needed = u128::from(work.supports_examined) + binomial(n, k);
        if needed > u128::from(limits.max_supports) {
            return Err(Error::WorkCapExceeded { what: "supports", needed, cap: limits.max_supports });
        }
        let mut witnesses = BTreeMap::new();
        for support in Combinations::new(n, k) {
            work.supports_examined += 1;
            work.active_set_solves += subsets as u64;
            if let Some(x) = support_feasible(inst, &support, limits)? {
                let record = inst.make_record(&x).expect("restricted minimizer is feasible");
                // A smaller support would have been found at an earlier k.
                assert_eq!(record.support, support, "optimal witness lost a coordinate");
                witnesses.insert(support, record);
            }
        }
        if witnesses.is_empty() {
            continue;
        }
        let optimal_supports: Vec<Vec<usize>> = witnesses.keys().cloned().collect();
        let mut res = EnumerationResult {
            kstar: k,
            optimal_supports,
            max_active_witness: witnesses.values().next().cloned().expect("nonempty"),
            witnesses,
            max_active_cardinality: 0,
            empirical_gamma: None,
            work,
        };
        let (count, witness) = max_active_cardinality(inst, &res, limits)?;
        res.work.active_set_solves += subsets as u64 * res.optimal_supports.len() as u64;
        res.max_active_cardinality = count;
        res.max_active_witness = witness;
        res.empirical_gamma = empirical_gamma(&res);
        return Ok(res);
    }
    Err(Error::NoSolutionWithinCap { kcap })
}

/// `max |I|` over optimal supports `S` and row sets `I` whose restricted
/// region is nonempty, with a witness attaining it.
///
/// A row set `W` whose equality-constrained minimizer is feasible with
/// residual within `eps^2` certifies the region for `W`; conversely every
/// nonempty region for `I` has such a `W ⊇ I`. So the maximum over regions
/// equals the maximum over these candidates.
pub fn max_active_cardinality(
    inst: &ProblemInstance,
    res: &EnumerationResult,
    limits: &Limits,
) -> Result<(usize, SolutionRecord)> {
    let mut best: Option<(usize, SolutionRecord)> = None;
    for support in &res.optimal_supports {
        let p = RestrictedProblem { instance: inst, support, forced_active: &[] };
        for cand in feasible_candidates(&p, limits)? {
            if cand.qstar > *inst.epsilon_sq() {
                continue;
            }
            let record = inst
                .make_record(&inst.embed(support, &cand.z))
                .expect("candidate is feasible");
            if record.support != *support {
                // Lies on a smaller support: impossible at the optimum.
                continue;
            }
            let size = record.active_set.len();
            if best.as_ref().is_none_or(|(b, _)| size > *b) {
                best = Some((size, record));
            }
        }
    }
    Ok(best.expect("every optimal support has a feasible candidate"))
}

/// Minimum nonzero magnitude across the stored witnesses.
pub fn empirical_gamma(res: &EnumerationResult) -> Option<Rat> {
    if res.kstar == 0 {
        return None;
    }
    res.witnesses
        .values()
        .flat_map(|r| r.x.iter())
        .filter(|v| !v.is_zero())
        .map(Signed::abs)
        .min()
}
