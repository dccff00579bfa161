//! Runs the core analyses and assembles report sections.

use zeronorm_core::conditions::{
    check_boundedness, check_mstar, check_necessary, classify_multiplicity, spark, Condition, ConditionContext,
    MultiplicityReport, NullityCase, Status,
};
use zeronorm_core::enumerate::{enumerate_sparsest, EnumerationResult};
use zeronorm_core::family::{build_family, sample_and_verify, SolutionFamily};
use zeronorm_core::{Error, Limits, ProblemInstance, Rat, SolutionRecord};

use crate::report::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Largest support size tried; `None` means `n`.
    pub kcap: Option<usize>,
    /// Family members listed per family.
    pub samples: usize,
    pub limits: Limits,
}

impl Default for Options {
    fn default() -> Self {
        Options { kcap: None, samples: 5, limits: Limits::default() }
    }
}

pub fn instance_summary(inst: &ProblemInstance) -> InstanceSummary {
    InstanceSummary { m: inst.m(), n: inst.n(), l: inst.l(), epsilon: num(inst.epsilon()) }
}

fn empty_report(command: &str, inst: &ProblemInstance) -> Report {
    Report {
        schema_version: SCHEMA_VERSION,
        command: String::from(command),
        instance: instance_summary(inst),
        check: None,
        enumeration: None,
        witnesses: Vec::new(),
        boundedness: None,
        spark: None,
        work: None,
        elapsed_ms: None,
    }
}

pub fn point_section(rec: &SolutionRecord) -> PointSection {
    PointSection {
        x: nums(&rec.x),
        support: one_based(&rec.support),
        active_set: one_based(&rec.active_set),
        residual_sq: num(&rec.residual_sq),
        strict_interior: rec.strict_interior,
    }
}

pub fn enumerate(inst: &ProblemInstance, opts: &Options) -> Result<(usize, EnumerationResult), Error> {
    let kcap = opts.kcap.unwrap_or(inst.n());
    enumerate_sparsest(inst, kcap, &opts.limits).map(|r| (kcap, r))
}

fn enumeration_section(kcap: usize, res: &EnumerationResult) -> EnumerationSection {
    EnumerationSection {
        kcap,
        kstar: res.kstar,
        optimal_supports: res.optimal_supports.iter().map(|s| one_based(s)).collect(),
        max_active_cardinality: res.max_active_cardinality,
        max_active_witness: point_section(&res.max_active_witness),
        empirical_gamma: res.empirical_gamma.as_ref().map(num),
    }
}

fn case_name(c: NullityCase) -> &'static str {
    match c {
        NullityCase::MstarOnly => "Null(M*) nontrivial, Null(B_{Ī,S}) trivial",
        NullityCase::Both => "Null(M*) and Null(B_{Ī,S}) both nontrivial",
        NullityCase::InactiveOnly => "Null(M*) trivial, Null(B_{Ī,S}) nontrivial",
        NullityCase::Neither => "Null(M*) and Null(B_{Ī,S}) both trivial",
    }
}

fn multiplicity_section(m: &MultiplicityReport) -> MultiplicitySection {
    MultiplicitySection {
        case: String::from(case_name(m.case)),
        mstar_nullity: m.mstar_nullity,
        inactive_nullity: m.inactive_nullity,
        conditions: m
            .entries
            .iter()
            .map(|e| ConditionSection {
                label: String::from(e.condition.label()),
                status: String::from(e.status.as_str()),
                note: e.note.clone(),
                directions: e.directions.iter().map(|d| nums(d)).collect(),
            })
            .collect(),
    }
}

/// Builds and re-verifies a family, then renders it. At least one member is
/// always verified, even when none are listed.
pub fn family_section(
    ctx: &ConditionContext<'_>,
    condition: Condition,
    direction: &[Rat],
    samples: usize,
) -> Result<(SolutionFamily, FamilySection), Error> {
    let fam = build_family(ctx, condition, direction)?;
    let members = sample_and_verify(ctx.instance, &fam, samples.max(1))?;
    let iv = &fam.interval;
    let section = FamilySection {
        condition: String::from(condition.label()),
        direction: nums(&fam.direction),
        interval: IntervalSection {
            lower: endpoint(&iv.lower),
            upper: endpoint(&iv.upper),
            lower_open: iv.lower_open,
            upper_open: iv.upper_open,
            inner_lower: iv.inner_lower.as_ref().map(num),
            inner_upper: iv.inner_upper.as_ref().map(num),
        },
        verified_samples: members.len(),
        samples: members
            .iter()
            .take(samples)
            .map(|m| SampleSection { lambda: num(&m.lambda), x: nums(&m.record.x) })
            .collect(),
    };
    Ok((fam, section))
}

/// Necessary check, multiplicity classification and every family for one
/// sparsest solution.
pub fn witness_section(
    inst: &ProblemInstance,
    rec: &SolutionRecord,
    res: &EnumerationResult,
    samples: usize,
) -> Result<WitnessSection, Error> {
    let ctx = ConditionContext::new(inst, rec.clone());
    let nc = check_necessary(&ctx);
    let mult = classify_multiplicity(&ctx, res)?;
    let mut families = Vec::new();
    for entry in mult.holding() {
        for d in &entry.directions {
            families.push(family_section(&ctx, entry.condition, d, samples)?.1);
        }
    }
    Ok(WitnessSection {
        point: point_section(rec),
        necessary: Some(NecessarySection {
            holds: nc.holds,
            violation_direction: nc.violation_direction.map(|d| nums(&ctx.embed(&d))),
        }),
        mstar_full_rank: Some(check_mstar(&ctx)),
        multiplicity: Some(multiplicity_section(&mult)),
        families,
    })
}

pub fn boundedness_section(inst: &ProblemInstance, res: &EnumerationResult, limits: &Limits) -> Result<Option<BoundednessSection>, Error> {
    if res.kstar == 0 {
        return Ok(None);
    }
    let mut b = check_boundedness(inst, res.kstar, limits)?;
    b.empirical_gamma = res.empirical_gamma.clone();
    let verdict = if b.bounded_certified {
        "bounded (certified)"
    } else {
        "boundedness undetermined"
    };
    Ok(Some(BoundednessSection {
        kstar: res.kstar,
        e1: b.e1,
        e2: b.e2,
        e3: b.e3,
        spark: b.spark,
        bounded_certified: b.bounded_certified,
        verdict: String::from(verdict),
        e1_counterexample: b
            .e1_counterexample
            .map(|(cols, eta)| CounterexampleSection { columns: one_based(&cols), direction: nums(&eta) }),
        e2_counterexample: b.e2_counterexample.map(|c| one_based(&c)),
        empirical_gamma: b.empirical_gamma.as_ref().map(num),
    }))
}

fn work(res: &EnumerationResult) -> Option<WorkSection> {
    Some(WorkSection {
        supports_examined: res.work.supports_examined,
        active_set_solves: res.work.active_set_solves,
    })
}

/// Full pipeline.
pub fn analyze(inst: &ProblemInstance, opts: &Options) -> Result<Report, Error> {
    let (kcap, res) = enumerate(inst, opts)?;
    let mut report = empty_report("analyze", inst);
    report.enumeration = Some(enumeration_section(kcap, &res));
    for rec in res.witnesses.values() {
        report.witnesses.push(witness_section(inst, rec, &res, opts.samples)?);
    }
    report.boundedness = boundedness_section(inst, &res, &opts.limits)?;
    report.spark = Some(spark(inst.a()));
    report.work = work(&res);
    Ok(report)
}

pub fn enumerate_report(inst: &ProblemInstance, opts: &Options) -> Result<Report, Error> {
    let (kcap, res) = enumerate(inst, opts)?;
    let mut report = empty_report("enumerate", inst);
    report.enumeration = Some(enumeration_section(kcap, &res));
    report.witnesses = res
        .witnesses
        .values()
        .map(|rec| WitnessSection {
            point: point_section(rec),
            necessary: None,
            mstar_full_rank: None,
            multiplicity: None,
            families: Vec::new(),
        })
        .collect();
    report.work = work(&res);
    Ok(report)
}

/// Classification of one claimed sparsest solution, with its families.
pub fn classify_report(inst: &ProblemInstance, x: &[Rat], opts: &Options) -> Result<Report, Error> {
    let rec = inst.make_record(x)?;
    let (kcap, res) = enumerate(inst, opts)?;
    let mut report = empty_report("classify", inst);
    report.enumeration = Some(enumeration_section(kcap, &res));
    report.witnesses.push(witness_section(inst, &rec, &res, opts.samples)?);
    report.work = work(&res);
    Ok(report)
}

/// One family at a point. Without an explicit direction every certifying
/// direction reported by the classification is used.
pub fn family_report(
    inst: &ProblemInstance,
    x: &[Rat],
    condition: Condition,
    direction: Option<&[Rat]>,
    opts: &Options,
) -> Result<Report, Error> {
    let rec = inst.make_record(x)?;
    let (_, res) = enumerate(inst, opts)?;
    let ctx = ConditionContext::new(inst, rec.clone());
    let mult = classify_multiplicity(&ctx, &res)?;
    let directions: Vec<Vec<Rat>> = match direction {
        Some(d) => vec![d.to_vec()],
        None => {
            let entry = mult.entry(condition);
            if entry.status != Status::Holds {
                return Err(Error::InvalidDirection {
                    condition: condition.label(),
                    reason: "condition does not hold at this point",
                });
            }
            entry.directions.clone()
        }
    };
    let mut families = Vec::new();
    for d in &directions {
        families.push(family_section(&ctx, condition, d, opts.samples)?.1);
    }
    let mut report = empty_report("family", inst);
    report.witnesses.push(WitnessSection {
        point: point_section(&rec),
        necessary: None,
        mstar_full_rank: None,
        multiplicity: None,
        families,
    });
    report.work = work(&res);
    Ok(report)
}

pub fn boundedness_report(inst: &ProblemInstance, opts: &Options) -> Result<Report, Error> {
    let (kcap, res) = enumerate(inst, opts)?;
    let mut report = empty_report("boundedness", inst);
    report.enumeration = Some(enumeration_section(kcap, &res));
    report.boundedness = boundedness_section(inst, &res, &opts.limits)?;
    report.work = work(&res);
    Ok(report)
}

pub fn spark_report(inst: &ProblemInstance) -> Report {
    let mut report = empty_report("spark", inst);
    report.spark = Some(spark(inst.a()));
    report
}

pub fn check_report(inst: &ProblemInstance, x: &[Rat]) -> Report {
    let mut report = empty_report("check", inst);
    let bx = inst.b_mat().mul_vec(x);
    let active: Vec<usize> = bx.iter().zip(inst.b()).enumerate().filter(|(_, (l, r))| l == r).map(|(j, _)| j).collect();
    report.check = Some(CheckSection {
        feasible: inst.is_feasible(x),
        residual_sq: num(&inst.residual_sq(x)),
        support: one_based(&zeronorm_core::model::support_of(x)),
        active_set: one_based(&active),
    });
    report
}
