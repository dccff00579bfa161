//! Necessary conditions, multiplicity conditions and boundedness criteria
//! for a sparsest solution.
//!
//! Notation: `S` is the support of the point, `I` its active rows of
//! `B x <= b` and `Ī` the inactive rows. `M*` stacks `A_S` over `B_{I,S}`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::enumerate::{binomial, Combinations, EnumerationResult};
use crate::error::{Error, Result};
use crate::linalg::{null_space_vectors, MatQ, VecQ};
use crate::lp::{cone_is_trivial, exists_nonkernel_point, strict_cone_feasible, ConeTest};
use crate::model::{ProblemInstance, SolutionRecord};
use crate::rat::Rat;
use crate::Limits;

/// Submatrices of a feasible point that every condition is phrased in.
#[derive(Clone, Debug)]
pub struct ConditionContext<'a> {
    pub instance: &'a ProblemInstance,
    pub record: SolutionRecord,
    pub inactive: Vec<usize>,
    pub a_s: MatQ,
    pub b_s: MatQ,
    pub b_is: MatQ,
    pub b_ibar_s: MatQ,
    pub mstar: MatQ,
    pub mstar_nullity: usize,
}

impl<'a> ConditionContext<'a> {
    pub fn new(instance: &'a ProblemInstance, record: SolutionRecord) -> Self {
        let s = &record.support;
        let inactive = record.inactive_set(instance.l());
        let a_s = instance.a().select_cols(s);
        let b_s = instance.b_mat().select_cols(s);
        let b_is = b_s.select_rows(&record.active_set);
        let b_ibar_s = b_s.select_rows(&inactive);
        let mstar = a_s.vstack(&b_is);
        let mstar_nullity = mstar.cols() - mstar.rank();
        ConditionContext { instance, record, inactive, a_s, b_s, b_is, b_ibar_s, mstar, mstar_nullity }
    }

    /// Builds the context for `x`, which must be feasible.
    pub fn for_point(instance: &'a ProblemInstance, x: &[Rat]) -> Result<Self> {
        Ok(Self::new(instance, instance.make_record(x)?))
    }

    /// Embeds a direction over `S` into `R^n`.
    pub fn embed(&self, d: &[Rat]) -> VecQ {
        self.instance.embed(&self.record.support, d)
    }

    /// Restricts an `R^n` direction to `S`.
    pub fn restrict(&self, d: &[Rat]) -> VecQ {
        self.record.support.iter().map(|&i| d[i].clone()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecessaryCheck {
    pub holds: bool,
    /// Nonzero direction over `S` in `Null(A_S) ∩ Null(B_S)` when violated.
    pub violation_direction: Option<VecQ>,
}

/// Every sparsest solution has `[A_S; B_S]` of full column rank.
pub fn check_necessary(ctx: &ConditionContext<'_>) -> NecessaryCheck {
    let stacked = ctx.a_s.vstack(&ctx.b_s);
    let dir = null_space_vectors(&stacked).into_iter().next();
    NecessaryCheck { holds: dir.is_none(), violation_direction: dir }
}

/// `M*` has full column rank.
pub fn check_mstar(ctx: &ConditionContext<'_>) -> bool {
    ctx.mstar_nullity == 0
}

/// The multiplicity conditions, with report labels that keep them apart
/// from the problem-class names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    C1,
    C2,
    C3,
    C4,
    D1,
    D2,
    D3,
    D4,
    D5,
}

impl Condition {
    pub const ALL: [Condition; 9] = [
        Condition::C1,
        Condition::C2,
        Condition::C3,
        Condition::C4,
        Condition::D1,
        Condition::D2,
        Condition::D3,
        Condition::D4,
        Condition::D5,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Condition::C1 => "TH3.1-C1",
            Condition::C2 => "TH3.1-C2",
            Condition::C3 => "TH3.1-C3",
            Condition::C4 => "TH3.1-C4",
            Condition::D1 => "TH3.2-D1",
            Condition::D2 => "TH3.2-D2",
            Condition::D3 => "TH3.2-D3",
            Condition::D4 => "TH3.2-D4",
            Condition::D5 => "TH3.2-D5",
        }
    }

    /// Accepts `C3`, `c3` or the full label `TH3.1-C3`.
    pub fn parse(s: &str) -> Option<Condition> {
        let short = s.rsplit('-').next().unwrap_or(s);
        Condition::ALL
            .into_iter()
            .find(|c| c.label().rsplit('-').next().is_some_and(|l| l.eq_ignore_ascii_case(short)))
    }

    /// Whether the condition needs `||y - A x||_2 < epsilon`.
    pub fn needs_strict_interior(self) -> bool {
        !matches!(self, Condition::C1 | Condition::D1 | Condition::D2)
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Holds,
    Fails,
    NotApplicable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::NotApplicable => "not-applicable",
        }
    }
}

/// Which of the four `Null(M*)` / `Null(B_{Ī,S})` combinations applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullityCase {
    /// `Null(M*) != {0}`, `Null(B_{Ī,S}) = {0}`.
    MstarOnly,
    /// Both nontrivial.
    Both,
    /// `Null(M*) = {0}`, `Null(B_{Ī,S}) != {0}`.
    InactiveOnly,
    /// Both trivial.
    Neither,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionEntry {
    pub condition: Condition,
    pub status: Status,
    /// Directions in `R^n` (zero off `S`) certifying the condition. C1 lists
    /// one per basis vector of `Null(M*)`.
    pub directions: Vec<VecQ>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicityReport {
    pub entries: Vec<ConditionEntry>,
    pub strict_interior: bool,
    pub case: NullityCase,
    pub mstar_nullity: usize,
    pub inactive_nullity: usize,
}

impl MultiplicityReport {
    pub fn entry(&self, c: Condition) -> &ConditionEntry {
        self.entries.iter().find(|e| e.condition == c).expect("all conditions present")
    }

    pub fn status(&self, c: Condition) -> Status {
        self.entry(c).status
    }

    pub fn holding(&self) -> impl Iterator<Item = &ConditionEntry> {
        self.entries.iter().filter(|e| e.status == Status::Holds)
    }
}

fn decided(c: Condition, test: ConeTest, ctx: &ConditionContext<'_>, note: &str) -> ConditionEntry {
    let directions = test.witness.iter().map(|w| ctx.embed(w)).collect();
    ConditionEntry {
        condition: c,
        status: if test.holds { Status::Holds } else { Status::Fails },
        directions,
        note: String::from(note),
    }
}

fn skipped(c: Condition, note: String) -> ConditionEntry {
    ConditionEntry { condition: c, status: Status::NotApplicable, directions: Vec::new(), note }
}

/// Decides every multiplicity condition for a sparsest solution.
pub fn classify_multiplicity(ctx: &ConditionContext<'_>, enumeration: &EnumerationResult) -> Result<MultiplicityReport> {
    let rec = &ctx.record;
    if rec.support.len() != enumeration.kstar {
        return Err(Error::NotSparsest { support: rec.support.len(), kstar: enumeration.kstar });
    }
    let inactive_kernel = null_space_vectors(&ctx.b_ibar_s);
    let mstar_trivial = ctx.mstar_nullity == 0;
    let case = match (mstar_trivial, inactive_kernel.is_empty()) {
        (false, true) => NullityCase::MstarOnly,
        (false, false) => NullityCase::Both,
        (true, false) => NullityCase::InactiveOnly,
        (true, true) => NullityCase::Neither,
    };
    let strict = rec.strict_interior;
    let mut entries = Vec::with_capacity(9);

    // C1: Null(M*) nontrivial and |I(x*)| below the maximum over all sparsest solutions.
    if mstar_trivial {
        entries.push(skipped(Condition::C1, String::from("Null(M*) = {0}")));
    } else {
        let below_max = rec.active_set.len() < enumeration.max_active_cardinality;
        let note = format!(
            "|I(x*)| = {}, max over sparsest solutions = {}",
            rec.active_set.len(),
            enumeration.max_active_cardinality
        );
        let directions = if below_max {
            null_space_vectors(&ctx.mstar).iter().map(|v| ctx.embed(v)).collect()
        } else {
            Vec::new()
        };
        entries.push(ConditionEntry {
            condition: Condition::C1,
            status: if below_max { Status::Holds } else { Status::Fails },
            directions,
            note,
        });
    }

    // C2-C4 live in the case Null(M*) = {0}, Null(B_{Ī,S}) != {0}.
    let c_pre = if case != NullityCase::InactiveOnly {
        Some(String::from("requires Null(M*) = {0} and Null(B_{Ī,S}) != {0}"))
    } else if !strict {
        Some(String::from("requires ||y - A x*||_2 < epsilon"))
    } else {
        None
    };
    match &c_pre {
        Some(note) => {
            for c in [Condition::C2, Condition::C3, Condition::C4] {
                entries.push(skipped(c, note.clone()));
            }
        }
        None => {
            let bs_kernel = null_space_vectors(&ctx.b_s).into_iter().next();
            entries.push(decided(
                Condition::C2,
                ConeTest { holds: bs_kernel.is_some(), witness: bs_kernel },
                ctx,
                "Null(B_S) != {0}",
            ));
            let c3 = strict_cone_feasible(&ctx.b_is, &ctx.b_ibar_s);
            let c4 = strict_cone_feasible(&ctx.b_is.neg(), &ctx.b_ibar_s);
            assert_eq!(c3.holds, c4.holds, "sign-mirrored cone tests disagree");
            entries.push(decided(Condition::C3, c3, ctx, "{d: B_{I,S} d > 0} ∩ Null(B_{Ī,S}) != ∅"));
            entries.push(decided(Condition::C4, c4, ctx, "{d: B_{I,S} d < 0} ∩ Null(B_{Ī,S}) != ∅"));
        }
    }

    // D1-D5 live in the case where both null spaces are trivial.
    if case != NullityCase::Neither {
        let note = String::from("requires Null(M*) = {0} and Null(B_{Ī,S}) = {0}");
        for c in [Condition::D1, Condition::D2, Condition::D3, Condition::D4, Condition::D5] {
            entries.push(skipped(c, note.clone()));
        }
    } else {
        let d1 = strict_cone_feasible(&ctx.b_is, &ctx.a_s);
        let d2 = strict_cone_feasible(&ctx.b_is.neg(), &ctx.a_s);
        assert_eq!(d1.holds, d2.holds, "sign-mirrored cone tests disagree");
        entries.push(decided(Condition::D1, d1, ctx, "{d: B_{I,S} d > 0} ∩ Null(A_S) != ∅"));
        entries.push(decided(Condition::D2, d2, ctx, "{d: B_{I,S} d < 0} ∩ Null(A_S) != ∅"));
        if strict {
            let bis_kernel = null_space_vectors(&ctx.b_is).into_iter().next();
            entries.push(decided(
                Condition::D3,
                ConeTest { holds: bis_kernel.is_some(), witness: bis_kernel },
                ctx,
                "Null(B_{I,S}) != {0}",
            ));
            let d4 = exists_nonkernel_point(&ctx.b_is, &ctx.a_s);
            let d5 = exists_nonkernel_point(&ctx.b_is.neg(), &ctx.a_s);
            assert_eq!(d4.holds, d5.holds, "sign-mirrored nonkernel tests disagree");
            entries.push(decided(Condition::D4, d4, ctx, "{d: B_{I,S} d > 0} ∩ {d: A_S d != 0} != ∅"));
            entries.push(decided(Condition::D5, d5, ctx, "{d: B_{I,S} d < 0} ∩ {d: A_S d != 0} != ∅"));
        } else {
            let note = String::from("requires ||y - A x*||_2 < epsilon");
            for c in [Condition::D3, Condition::D4, Condition::D5] {
                entries.push(skipped(c, note.clone()));
            }
        }
    }

    Ok(MultiplicityReport {
        entries,
        strict_interior: strict,
        case,
        mstar_nullity: ctx.mstar_nullity,
        inactive_nullity: inactive_kernel.len(),
    })
}

/// Smallest number of linearly dependent columns; `n + 1` when all `n`
/// columns are independent.
pub fn spark(a: &MatQ) -> usize {
    let n = a.cols();
    // Any rank(A) + 1 columns are dependent, so the search stops there.
    let limit = (a.rank() + 1).min(n);
    for size in 1..=limit {
        if Combinations::new(n, size).any(|cols| a.select_cols(&cols).rank() < size) {
            return size;
        }
    }
    n + 1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundednessReport {
    /// For every `|Π| = k`: `{η : A_Π η = 0, B_Π η <= 0} = {0}`.
    pub e1: bool,
    /// Every `k` columns of `A` are independent.
    pub e2: bool,
    /// `k < spark(A)`.
    pub e3: bool,
    pub spark: usize,
    pub bounded_certified: bool,
    /// First `Π` (lexicographic) whose cone is nontrivial, with a nonzero
    /// `η ∈ R^n` supported on it.
    pub e1_counterexample: Option<(Vec<usize>, VecQ)>,
    /// First `Π` with dependent columns.
    pub e2_counterexample: Option<Vec<usize>>,
    pub empirical_gamma: Option<Rat>,
}

/// Checks the three sufficient conditions for a bounded solution set.
/// `empirical_gamma` is left for the caller to fill.
pub fn check_boundedness(inst: &ProblemInstance, kstar: usize, limits: &Limits) -> Result<BoundednessReport> {
    assert!(kstar >= 1, "boundedness is checked for kstar >= 1");
    let n = inst.n();
    let needed = binomial(n, kstar);
    if needed > u128::from(limits.max_supports) {
        return Err(Error::WorkCapExceeded { what: "column subsets", needed, cap: limits.max_supports });
    }
    let a = inst.a();
    let mut e1_counterexample = None;
    let mut e2_counterexample = None;
    for pi in Combinations::new(n, kstar) {
        let a_pi = a.select_cols(&pi);
        let kernel = null_space_vectors(&a_pi);
        if kernel.is_empty() {
            continue;
        }
        if e2_counterexample.is_none() {
            e2_counterexample = Some(pi.clone());
        }
        if e1_counterexample.is_some() {
            continue;
        }
        // η = N t over the kernel basis N; the cone is B_Π N t <= 0.
        let basis = MatQ::from_rows(pi.len(), &kernel).transpose();
        let cone = inst.b_mat().select_cols(&pi).mul(&basis);
        let test = cone_is_trivial(&cone);
        if !test.holds {
            let t = test.witness.expect("nontrivial cone has a witness");
            let eta = crate::rat::primitive(&basis.mul_vec(&t));
            e1_counterexample = Some((pi.clone(), inst.embed(&pi, &eta)));
        }
    }
    let e1 = e1_counterexample.is_none();
    let e2 = e2_counterexample.is_none();
    let spark = spark(a);
    let e3 = kstar < spark;
    Ok(BoundednessReport {
        e1,
        e2,
        e3,
        spark,
        bounded_certified: e1 || e2 || e3,
        e1_counterexample,
        e2_counterexample,
        empirical_gamma: None,
    })
}
