//! Report model shared by the text and JSON renderings.
//!
//! Every number is carried as a [`Num`]: the exact value as a string plus a
//! double rendered with 17 significant digits. Both renderings print the
//! same strings, so they carry identical numeric content. Index sets are
//! 1-based throughout.

use std::fmt::Write;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use zeronorm_core::family::{Endpoint, RootBound};
use zeronorm_core::rat::{format_rat, to_f64};
use zeronorm_core::Rat;

pub const SCHEMA_VERSION: u32 = 1;

/// A double printed with 17 significant digits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Float(pub f64);

impl Float {
    pub fn text(self) -> String {
        format!("{:.16e}", self.0)
    }
}

impl Serialize for Float {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(self.text()).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Num {
    pub exact: String,
    pub approx: Option<Float>,
}

impl Num {
    pub fn text(&self) -> String {
        match self.approx {
            Some(f) => format!("{} [{}]", self.exact, f.text()),
            None => self.exact.clone(),
        }
    }
}

pub fn num(q: &Rat) -> Num {
    Num { exact: format_rat(q), approx: Some(Float(to_f64(q))) }
}

pub fn nums(v: &[Rat]) -> Vec<Num> {
    v.iter().map(num).collect()
}

fn root_expression(r: &RootBound) -> String {
    let sign = if r.negative { "-" } else { "" };
    format!(
        "{sign}({} - sqrt({})) / ({} * sqrt({}))",
        format_rat(&r.epsilon),
        format_rat(&r.residual_sq),
        format_rat(&r.scale),
        r.m
    )
}

pub fn endpoint(e: &Endpoint) -> Num {
    match e {
        Endpoint::NegInfinity => Num { exact: String::from("-inf"), approx: None },
        Endpoint::PosInfinity => Num { exact: String::from("+inf"), approx: None },
        Endpoint::Exact(q) => num(q),
        Endpoint::Root(r) => Num { exact: root_expression(r), approx: Some(Float(r.to_f64())) },
    }
}

/// 0-based indices to 1-based.
pub fn one_based(set: &[usize]) -> Vec<usize> {
    set.iter().map(|i| i + 1).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub instance: InstanceSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<EnumerationSection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundedness: Option<BoundednessSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spark: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub work: Option<WorkSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub epsilon: Num,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckSection {
    pub feasible: bool,
    pub residual_sq: Num,
    pub support: Vec<usize>,
    pub active_set: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointSection {
    pub x: Vec<Num>,
    pub support: Vec<usize>,
    pub active_set: Vec<usize>,
    pub residual_sq: Num,
    pub strict_interior: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnumerationSection {
    pub kcap: usize,
    pub kstar: usize,
    pub optimal_supports: Vec<Vec<usize>>,
    pub max_active_cardinality: usize,
    pub max_active_witness: PointSection,
    /// Minimum nonzero magnitude over the listed witnesses only.
    pub empirical_gamma: Option<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessarySection {
    pub holds: bool,
    pub violation_direction: Option<Vec<Num>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionSection {
    pub label: String,
    pub status: String,
    pub note: String,
    pub directions: Vec<Vec<Num>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplicitySection {
    pub case: String,
    pub mstar_nullity: usize,
    pub inactive_nullity: usize,
    pub conditions: Vec<ConditionSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSection {
    pub lower: Num,
    pub upper: Num,
    pub lower_open: bool,
    pub upper_open: bool,
    pub inner_lower: Option<Num>,
    pub inner_upper: Option<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSection {
    pub lambda: Num,
    pub x: Vec<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySection {
    pub condition: String,
    pub direction: Vec<Num>,
    pub interval: IntervalSection,
    pub verified_samples: usize,
    pub samples: Vec<SampleSection>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessSection {
    pub point: PointSection,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub necessary: Option<NecessarySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mstar_full_rank: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub multiplicity: Option<MultiplicitySection>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub families: Vec<FamilySection>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleSection {
    pub columns: Vec<usize>,
    pub direction: Vec<Num>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundednessSection {
    pub kstar: usize,
    pub e1: bool,
    pub e2: bool,
    pub e3: bool,
    pub spark: usize,
    pub bounded_certified: bool,
    pub verdict: String,
    pub e1_counterexample: Option<CounterexampleSection>,
    pub e2_counterexample: Option<Vec<usize>>,
    pub empirical_gamma: Option<Num>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WorkSection {
    pub supports_examined: u64,
    pub active_set_solves: u64,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Human-readable rendering. The `spark` command prints the bare number.
    pub fn to_text(&self) -> String {
        if let (true, Some(s)) = (self.command == "spark", self.spark) {
            return format!("{s}\n");
        }
        let mut out = String::new();
        render(self, &mut out).expect("writing to a String");
        out
    }
}

fn set(s: &[usize]) -> String {
    let items: Vec<String> = s.iter().map(usize::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn vector(v: &[Num]) -> String {
    let exact: Vec<&str> = v.iter().map(|n| n.exact.as_str()).collect();
    let approx: Vec<String> = v.iter().map(|n| n.approx.map_or_else(|| String::from("-"), Float::text)).collect();
    format!("({}) [{}]", exact.join(", "), approx.join(", "))
}

fn opt_num(n: &Option<Num>) -> String {
    n.as_ref().map_or_else(|| String::from("none"), Num::text)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn render_point(p: &PointSection, indent: &str, out: &mut String) -> std::fmt::Result {
    writeln!(out, "{indent}x = {}", vector(&p.x))?;
    writeln!(out, "{indent}support = {}", set(&p.support))?;
    writeln!(out, "{indent}active set = {}", set(&p.active_set))?;
    writeln!(out, "{indent}||y - Ax||^2 = {}", p.residual_sq.text())?;
    writeln!(out, "{indent}strict interior: {}", yes_no(p.strict_interior))
}

fn render(r: &Report, out: &mut String) -> std::fmt::Result {
    writeln!(out, "zeronorm {} (schema {})", r.command, r.schema_version)?;
    let i = &r.instance;
    writeln!(out, "instance: m = {}, n = {}, l = {}, epsilon = {}", i.m, i.n, i.l, i.epsilon.text())?;

    if let Some(c) = &r.check {
        writeln!(out, "\ncheck")?;
        writeln!(out, "  feasible: {}", yes_no(c.feasible))?;
        writeln!(out, "  support = {}", set(&c.support))?;
        writeln!(out, "  active set = {}", set(&c.active_set))?;
        writeln!(out, "  ||y - Ax||^2 = {}", c.residual_sq.text())?;
    }

    if let Some(e) = &r.enumeration {
        writeln!(out, "\nenumeration (kcap = {})", e.kcap)?;
        writeln!(out, "  kstar = {}", e.kstar)?;
        let supports: Vec<String> = e.optimal_supports.iter().map(|s| set(s)).collect();
        writeln!(out, "  optimal supports: {}", supports.join(" "))?;
        writeln!(out, "  max active cardinality = {}, attained at", e.max_active_cardinality)?;
        render_point(&e.max_active_witness, "    ", out)?;
        writeln!(out, "  empirical gamma (EMPIRICAL, listed witnesses only) = {}", opt_num(&e.empirical_gamma))?;
    }

    for w in &r.witnesses {
        writeln!(out, "\nwitness on support {}", set(&w.point.support))?;
        render_point(&w.point, "  ", out)?;
        if let Some(nc) = &w.necessary {
            match &nc.violation_direction {
                None => writeln!(out, "  necessary rank condition: holds")?,
                Some(d) => writeln!(out, "  necessary rank condition: VIOLATED along {}", vector(d))?,
            }
        }
        if let Some(full) = w.mstar_full_rank {
            writeln!(out, "  M* full column rank: {}", yes_no(full))?;
        }
        if let Some(m) = &w.multiplicity {
            writeln!(
                out,
                "  nullity case: {} (dim Null(M*) = {}, dim Null(B_{{Ī,S}}) = {})",
                m.case, m.mstar_nullity, m.inactive_nullity
            )?;
            for c in &m.conditions {
                writeln!(out, "  {:<9} {:<15} {}", c.label, c.status, c.note)?;
                for d in &c.directions {
                    writeln!(out, "            d = {}", vector(d))?;
                }
            }
        }
        for f in &w.families {
            writeln!(out, "  family {} along d = {}", f.condition, vector(&f.direction))?;
            let iv = &f.interval;
            writeln!(
                out,
                "    lambda in {}{}, {}{}",
                if iv.lower_open { "(" } else { "[" },
                iv.lower.text(),
                iv.upper.text(),
                if iv.upper_open { ")" } else { "]" }
            )?;
            writeln!(
                out,
                "    certified rational range: [{}, {}]",
                iv.inner_lower.as_ref().map_or_else(|| String::from("-inf"), Num::text),
                iv.inner_upper.as_ref().map_or_else(|| String::from("+inf"), Num::text)
            )?;
            writeln!(out, "    verified members: {}", f.verified_samples)?;
            for s in &f.samples {
                writeln!(out, "    lambda = {}: x = {}", s.lambda.text(), vector(&s.x))?;
            }
        }
    }

    if let Some(b) = &r.boundedness {
        writeln!(out, "\nboundedness (kstar = {})", b.kstar)?;
        writeln!(out, "  E1 (no recession direction on any kstar columns): {}", b.e1)?;
        writeln!(out, "  E2 (every kstar columns of A independent): {}", b.e2)?;
        writeln!(out, "  E3 (kstar < spark(A) = {}): {}", b.spark, b.e3)?;
        writeln!(out, "  verdict: {}", b.verdict)?;
        if let Some(c) = &b.e1_counterexample {
            writeln!(out, "  E1 fails on columns {} along {}", set(&c.columns), vector(&c.direction))?;
        }
        if let Some(c) = &b.e2_counterexample {
            writeln!(out, "  E2 fails on columns {}", set(c))?;
        }
        writeln!(out, "  empirical gamma (EMPIRICAL, listed witnesses only) = {}", opt_num(&b.empirical_gamma))?;
    }

    if let Some(s) = r.spark {
        writeln!(out, "\nspark(A) = {s}")?;
    }

    if let Some(w) = &r.work {
        writeln!(
            out,
            "\nwork: {} supports examined, {} active-set solves",
            w.supports_examined, w.active_set_solves
        )?;
    }
    if let Some(ms) = r.elapsed_ms {
        writeln!(out, "elapsed: {ms} ms")?;
    }
    Ok(())
}
