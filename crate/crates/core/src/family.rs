//! Explicit segments `x* + λ d` of sparsest solutions sharing one support.
//!
//! Interval endpoints come in two kinds: ratios of inactive-row slacks
//! (exact rationals) and the residual-ball bound
//! `(ε - ||e*||_2) / (||A_S d||_∞ √m)`, which is kept symbolically and paired
//! with a certified rational under-approximation so every sampled member can
//! be checked exactly.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::conditions::{Condition, ConditionContext};
use crate::error::{Error, Result};
use crate::linalg::{add, norm_inf, scale, VecQ};
use crate::model::{ProblemInstance, SolutionRecord};
use crate::rat::{int, primitive, sign_of_sqrt_sum, sqrt_f64, sqrt_lower, sqrt_upper, to_f64, Rat};

/// `±(epsilon - sqrt(residual_sq)) / (scale * sqrt(m))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootBound {
    pub epsilon: Rat,
    pub residual_sq: Rat,
    pub scale: Rat,
    pub m: usize,
    pub negative: bool,
}

/// Denominator of the first rational square-root bounds tried.
const SQRT_DENOMINATOR: i64 = 1_000_000;

impl RootBound {
    fn m_rat(&self) -> Rat {
        int(self.m as i64)
    }

    fn sign_factor(&self) -> Rat {
        if self.negative {
            -Rat::one()
        } else {
            Rat::one()
        }
    }

    pub fn to_f64(&self) -> f64 {
        let mag = (to_f64(&self.epsilon) - sqrt_f64(&self.residual_sq))
            / (to_f64(&self.scale) * sqrt_f64(&self.m_rat()));
        if self.negative {
            -mag
        } else {
            mag
        }
    }

    /// Rational `q` with `0 < q <= |value|`.
    pub fn magnitude_lower(&self) -> Rat {
        let mut den = BigInt::from(SQRT_DENOMINATOR);
        loop {
            let root_r = sqrt_upper(&self.residual_sq, &den);
            let root_m = sqrt_upper(&self.m_rat(), &den);
            let num = &self.epsilon - root_r;
            if num.is_positive() {
                return num / (&self.scale * root_m);
            }
            den *= 1000;
        }
    }

    /// Rational `q >= |value|`.
    pub fn magnitude_upper(&self) -> Rat {
        let den = BigInt::from(SQRT_DENOMINATOR);
        let root_r = sqrt_lower(&self.residual_sq, &den);
        let root_m = sqrt_lower(&self.m_rat(), &den);
        (&self.epsilon - root_r) / (&self.scale * root_m)
    }

    /// Exact comparison of the value with a rational.
    pub fn cmp_rat(&self, q: &Rat) -> Ordering {
        // value = σε/(c m) √m - (σ/c) √(r/m), so value - q has the form
        // p√s + q'√t + w.
        let m = self.m_rat();
        let sigma = self.sign_factor();
        let p = &sigma * &self.epsilon / (&self.scale * &m);
        let qq = -&sigma / &self.scale;
        let t = &self.residual_sq / &m;
        match sign_of_sqrt_sum(&p, &m, &qq, &t, &-q) {
            num_bigint::Sign::Minus => Ordering::Less,
            num_bigint::Sign::NoSign => Ordering::Equal,
            num_bigint::Sign::Plus => Ordering::Greater,
        }
    }

    /// Exact comparison with another bound built from the same base point.
    fn cmp_root(&self, other: &RootBound) -> Ordering {
        assert!(
            self.epsilon == other.epsilon && self.residual_sq == other.residual_sq && self.m == other.m,
            "root bounds from different base points"
        );
        // Both are σ K / c with the same K > 0.
        let a = self.sign_factor() / &self.scale;
        let b = other.sign_factor() / &other.scale;
        a.cmp(&b)
    }

    fn negated(&self) -> RootBound {
        RootBound { negative: !self.negative, ..self.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Endpoint {
    NegInfinity,
    PosInfinity,
    Exact(Rat),
    Root(RootBound),
}

impl Endpoint {
    pub fn to_f64(&self) -> f64 {
        match self {
            Endpoint::NegInfinity => f64::NEG_INFINITY,
            Endpoint::PosInfinity => f64::INFINITY,
            Endpoint::Exact(q) => to_f64(q),
            Endpoint::Root(r) => r.to_f64(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Endpoint::Exact(_) | Endpoint::Root(_))
    }

    pub fn cmp_exact(&self, other: &Endpoint) -> Ordering {
        use Endpoint::*;
        match (self, other) {
            (NegInfinity, NegInfinity) | (PosInfinity, PosInfinity) => Ordering::Equal,
            (NegInfinity, _) | (_, PosInfinity) => Ordering::Less,
            (PosInfinity, _) | (_, NegInfinity) => Ordering::Greater,
            (Exact(a), Exact(b)) => a.cmp(b),
            (Root(r), Exact(q)) => r.cmp_rat(q),
            (Exact(q), Root(r)) => r.cmp_rat(q).reverse(),
            (Root(a), Root(b)) => a.cmp_root(b),
        }
    }

    fn negated(&self) -> Endpoint {
        match self {
            Endpoint::NegInfinity => Endpoint::PosInfinity,
            Endpoint::PosInfinity => Endpoint::NegInfinity,
            Endpoint::Exact(q) => Endpoint::Exact(-q),
            Endpoint::Root(r) => Endpoint::Root(r.negated()),
        }
    }

    /// A rational no larger than the value (`None` for infinities).
    fn rational_below(&self) -> Option<Rat> {
        match self {
            Endpoint::Exact(q) => Some(q.clone()),
            Endpoint::Root(r) if r.negative => Some(-r.magnitude_upper()),
            Endpoint::Root(r) => Some(r.magnitude_lower()),
            _ => None,
        }
    }

    /// A rational no smaller than the value (`None` for infinities).
    fn rational_above(&self) -> Option<Rat> {
        match self {
            Endpoint::Exact(q) => Some(q.clone()),
            Endpoint::Root(r) if r.negative => Some(-r.magnitude_lower()),
            Endpoint::Root(r) => Some(r.magnitude_upper()),
            _ => None,
        }
    }
}

fn min_endpoint(a: Endpoint, b: Endpoint) -> Endpoint {
    if a.cmp_exact(&b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn max_endpoint(a: Endpoint, b: Endpoint) -> Endpoint {
    if a.cmp_exact(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

/// Range of `λ` for which `x* + λ d` is a sparsest solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaInterval {
    pub lower: Endpoint,
    pub upper: Endpoint,
    pub lower_open: bool,
    pub upper_open: bool,
    /// Rational enclosure `[inner_lower, inner_upper]` inside the interval.
    /// `None` on an infinite side.
    pub inner_lower: Option<Rat>,
    pub inner_upper: Option<Rat>,
}

impl LambdaInterval {
    pub fn new(lower: Endpoint, upper: Endpoint, lower_open: bool, upper_open: bool) -> Self {
        let inner_lower = lower.rational_above();
        let inner_upper = upper.rational_below();
        LambdaInterval { lower, upper, lower_open, upper_open, inner_lower, inner_upper }
    }

    /// `{-λ : λ in self}`.
    pub fn negated(&self) -> LambdaInterval {
        LambdaInterval {
            lower: self.upper.negated(),
            upper: self.lower.negated(),
            lower_open: self.upper_open,
            upper_open: self.lower_open,
            inner_lower: self.inner_upper.as_ref().map(|q| -q),
            inner_upper: self.inner_lower.as_ref().map(|q| -q),
        }
    }

    /// Exact membership test.
    pub fn contains(&self, lambda: &Rat) -> bool {
        let at = Endpoint::Exact(lambda.clone());
        let lo = at.cmp_exact(&self.lower);
        let hi = at.cmp_exact(&self.upper);
        let lower_ok = lo == Ordering::Greater || (lo == Ordering::Equal && !self.lower_open);
        let upper_ok = hi == Ordering::Less || (hi == Ordering::Equal && !self.upper_open);
        lower_ok && upper_ok
    }

    /// `count` distinct rationals strictly inside the certified enclosure:
    /// a uniform grid when both sides are finite, otherwise steps of
    /// `1, 2, 4, ...` away from the finite side (or from 0).
    pub fn sample_points(&self, count: usize) -> Vec<Rat> {
        let two = int(2);
        let pow = |i: usize| num_traits::pow(two.clone(), i);
        match (&self.inner_lower, &self.inner_upper) {
            (Some(lo), Some(hi)) => {
                let width = hi - lo;
                let steps = int(count as i64 + 1);
                (1..=count)
                    .map(|i| lo + &width * int(i as i64) / &steps)
                    .collect()
            }
            (None, Some(hi)) => (0..count).map(|i| hi - pow(i)).collect(),
            (Some(lo), None) => (0..count).map(|i| lo + pow(i)).collect(),
            (None, None) => (0..count)
                .map(|i| {
                    let v = pow(i / 2);
                    if i % 2 == 0 {
                        v
                    } else {
                        -v
                    }
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionFamily {
    pub base: SolutionRecord,
    /// Primitive direction in `R^n`, zero off the support.
    pub direction: VecQ,
    pub interval: LambdaInterval,
    pub condition: Condition,
}

impl SolutionFamily {
    pub fn point_at(&self, lambda: &Rat) -> VecQ {
        add(&self.base.x, &scale(&self.direction, lambda))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyMember {
    pub lambda: Rat,
    pub record: SolutionRecord,
}

fn invalid(condition: Condition, reason: &'static str) -> Error {
    Error::InvalidDirection { condition: condition.label(), reason }
}

struct Geometry {
    /// `B_{Ī,S} d`.
    drift: VecQ,
    /// `b_Ī - B_{Ī,S} x*_S`, strictly positive.
    slack: VecQ,
    /// `A_S d`.
    model_change: VecQ,
    /// `B_{I,S} d`.
    active_change: VecQ,
    /// `B_S d`.
    all_change: VecQ,
}

impl Geometry {
    fn new(ctx: &ConditionContext<'_>, d_s: &[Rat]) -> Self {
        let x_s = ctx.restrict(&ctx.record.x);
        let b = ctx.instance.b();
        let bx = ctx.b_ibar_s.mul_vec(&x_s);
        let slack = ctx.inactive.iter().zip(&bx).map(|(&j, v)| &b[j] - v).collect();
        Geometry {
            drift: ctx.b_ibar_s.mul_vec(d_s),
            slack,
            model_change: ctx.a_s.mul_vec(d_s),
            active_change: ctx.b_is.mul_vec(d_s),
            all_change: ctx.b_s.mul_vec(d_s),
        }
    }

    /// `min slack_j / drift_j` over rows with positive drift.
    fn step_up(&self) -> Option<Rat> {
        self.ratios().filter(|(g, _)| g.is_positive()).map(|(_, r)| r).min()
    }

    /// `max slack_j / drift_j` over rows with negative drift.
    fn step_down(&self) -> Option<Rat> {
        self.ratios().filter(|(g, _)| g.is_negative()).map(|(_, r)| r).max()
    }

    /// `min slack_j / |drift_j|` over rows with nonzero drift.
    fn step_either(&self) -> Option<Rat> {
        self.ratios().filter(|(g, _)| !g.is_zero()).map(|(_, r)| r.abs()).min()
    }

    fn ratios(&self) -> impl Iterator<Item = (&Rat, Rat)> + '_ {
        self.drift
            .iter()
            .zip(&self.slack)
            .filter(|(g, _)| !g.is_zero())
            .map(|(g, s)| (g, s / g))
    }

    fn ball_bound(&self, ctx: &ConditionContext<'_>, negative: bool) -> Endpoint {
        Endpoint::Root(RootBound {
            epsilon: ctx.instance.epsilon().clone(),
            residual_sq: ctx.record.residual_sq.clone(),
            scale: norm_inf(&self.model_change),
            m: ctx.instance.m(),
            negative,
        })
    }
}

fn all_zero(v: &[Rat]) -> bool {
    v.iter().all(Zero::is_zero)
}

fn all_positive(v: &[Rat]) -> bool {
    v.iter().all(Signed::is_positive)
}

/// Interval for the conditions whose direction moves toward negative `λ`
/// or both ways. Mirrored labels are handled by the caller.
fn base_interval(ctx: &ConditionContext<'_>, label: Condition, d_s: &[Rat]) -> Result<LambdaInterval> {
    let g = Geometry::new(ctx, d_s);
    let strict = ctx.record.strict_interior;
    if label.needs_strict_interior() && !strict {
        return Err(invalid(label, "needs ||y - A x*||_2 < epsilon"));
    }
    let zero = || Endpoint::Exact(Rat::zero());
    let or_neg_inf = |q: Option<Rat>| q.map_or(Endpoint::NegInfinity, Endpoint::Exact);
    let or_pos_inf = |q: Option<Rat>| q.map_or(Endpoint::PosInfinity, Endpoint::Exact);
    Ok(match label {
        Condition::C1 => {
            if !all_zero(&g.model_change) || !all_zero(&g.active_change) {
                return Err(invalid(label, "direction is not in Null(M*)"));
            }
            if all_zero(&g.drift) {
                return Err(invalid(label, "direction is also in Null(B_{Ī,S})"));
            }
            LambdaInterval::new(or_neg_inf(g.step_down()), or_pos_inf(g.step_up()), false, false)
        }
        Condition::C2 => {
            if !all_zero(&g.all_change) {
                return Err(invalid(label, "direction is not in Null(B_S)"));
            }
            if all_zero(&g.model_change) {
                return Err(invalid(label, "direction is also in Null(A_S)"));
            }
            LambdaInterval::new(g.ball_bound(ctx, true), g.ball_bound(ctx, false), false, false)
        }
        Condition::C3 => {
            if !all_positive(&g.active_change) || !all_zero(&g.drift) {
                return Err(invalid(label, "direction is not in {B_{I,S} d > 0} ∩ Null(B_{Ī,S})"));
            }
            if all_zero(&g.model_change) {
                LambdaInterval::new(Endpoint::NegInfinity, zero(), false, true)
            } else {
                LambdaInterval::new(g.ball_bound(ctx, true), zero(), false, true)
            }
        }
        Condition::D1 => {
            if !all_positive(&g.active_change) || !all_zero(&g.model_change) {
                return Err(invalid(label, "direction is not in {B_{I,S} d > 0} ∩ Null(A_S)"));
            }
            LambdaInterval::new(or_neg_inf(g.step_down()), zero(), false, true)
        }
        Condition::D3 => {
            if !all_zero(&g.active_change) {
                return Err(invalid(label, "direction is not in Null(B_{I,S})"));
            }
            if all_zero(&g.model_change) {
                return Err(invalid(label, "direction is also in Null(A_S)"));
            }
            let ball = g.ball_bound(ctx, false);
            let bound = match g.step_either() {
                Some(q) => min_endpoint(Endpoint::Exact(q), ball),
                None => ball,
            };
            LambdaInterval::new(bound.negated(), bound, false, false)
        }
        Condition::D4 => {
            if !all_positive(&g.active_change) || all_zero(&g.model_change) {
                return Err(invalid(label, "direction is not in {B_{I,S} d > 0} ∩ {A_S d != 0}"));
            }
            let ball = g.ball_bound(ctx, true);
            let lower = match g.step_down() {
                Some(q) => max_endpoint(Endpoint::Exact(q), ball),
                None => ball,
            };
            LambdaInterval::new(lower, zero(), false, true)
        }
        Condition::C4 | Condition::D2 | Condition::D5 => unreachable!("mirrored labels are reduced first"),
    })
}

/// Builds the family for a condition reported as holding with direction
/// `d` (in `R^n`, zero off the support). Memberships that define the
/// condition are re-verified here.
pub fn build_family(ctx: &ConditionContext<'_>, label: Condition, d: &[Rat]) -> Result<SolutionFamily> {
    let n = ctx.instance.n();
    if d.len() != n {
        return Err(invalid(label, "direction has the wrong length"));
    }
    let support = &ctx.record.support;
    if d.iter().enumerate().any(|(i, v)| !v.is_zero() && support.binary_search(&i).is_err()) {
        return Err(invalid(label, "direction leaves the support"));
    }
    let direction = primitive(d);
    let d_s = ctx.restrict(&direction);
    if all_zero(&d_s) {
        return Err(invalid(label, "direction is zero"));
    }
    let mirror = |base: Condition| -> Result<LambdaInterval> {
        let flipped: VecQ = d_s.iter().map(|x| -x).collect();
        base_interval(ctx, base, &flipped)
            .map(|iv| iv.negated())
            .map_err(|_| invalid(label, "direction fails the mirrored membership test"))
    };
    let interval = match label {
        Condition::C4 => mirror(Condition::C3)?,
        Condition::D2 => mirror(Condition::D1)?,
        Condition::D5 => mirror(Condition::D4)?,
        _ => base_interval(ctx, label, &d_s)?,
    };
    Ok(SolutionFamily { base: ctx.record.clone(), direction, interval, condition: label })
}

/// Samples `count` members from the certified enclosure and re-verifies each
/// one exactly: feasible, with the base support.
pub fn sample_and_verify(inst: &ProblemInstance, fam: &SolutionFamily, count: usize) -> Result<Vec<FamilyMember>> {
    let mut out = Vec::with_capacity(count);
    for lambda in fam.interval.sample_points(count) {
        let x = fam.point_at(&lambda);
        let record = match inst.make_record(&x) {
            Ok(r) if r.support == fam.base.support => r,
            _ => return Err(Error::VerificationFailure { lambda }),
        };
        out.push(FamilyMember { lambda, record });
    }
    out.sort_by(|a, b| a.lambda.cmp(&b.lambda));
    Ok(out)
}
