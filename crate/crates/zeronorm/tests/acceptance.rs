//! Acceptance criteria. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; exits nonzero if any fails.

mod common;

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use zeronorm_core::conditions::{
    check_boundedness, check_mstar, check_necessary, classify_multiplicity, spark, Condition, ConditionContext, Status,
};
use zeronorm_core::enumerate::{enumerate_sparsest, Combinations, EnumerationResult};
use zeronorm_core::family::{build_family, sample_and_verify, Endpoint};
use zeronorm_core::linalg::{null_space_vectors, solve_linear};
use zeronorm_core::lp::{lp_max, LpOutcome, LpProblem};
use zeronorm_core::qp::{min_residual, RestrictedProblem};
use zeronorm_core::rat::{int, parse_rat, ratio, to_f64};
use zeronorm_core::{Error, Limits, MatQ, ProblemInstance, Rat, VecQ};

use common::{corpus, example, rng, small_rat};

const CORPUS_SIZE: usize = 240;
const CORPUS_SEED: u64 = 0x5EED_0001;
const FAMILY_SAMPLES: usize = 128;

fn point(tokens: &[&str]) -> VecQ {
    tokens.iter().map(|t| parse_rat(t).unwrap()).collect()
}

fn limits() -> Limits {
    Limits::default()
}

/// Checks accumulate failure messages; an empty list is a pass.
struct Check {
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Check { failures: Vec::new() }
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

fn inv_10_sqrt3() -> f64 {
    1.0 / (10.0 * 3f64.sqrt())
}

fn criterion_1(inst: &ProblemInstance, c: &mut Check) -> EnumerationResult {
    let start = Instant::now();
    let res = enumerate_sparsest(inst, inst.n(), &limits()).unwrap();
    let elapsed = start.elapsed();
    c.expect(res.kstar == 2, format!("kstar = {}", res.kstar));
    for (support, x) in [(vec![2, 3], point(&["0", "0", "2", "1"])), (vec![1, 2], point(&["0", "1", "-1/2", "0"]))] {
        c.expect(res.optimal_supports.contains(&support), format!("support {support:?} missing"));
        c.expect(res.witnesses.get(&support).map(|r| &r.x) == Some(&x), format!("witness for {support:?}"));
    }
    c.expect(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"));
    res
}

fn criterion_2(inst: &ProblemInstance, res: &EnumerationResult, c: &mut Check) {
    let ctx = ConditionContext::for_point(inst, &point(&["0", "0", "2", "1"])).unwrap();
    let rep = classify_multiplicity(&ctx, res).unwrap();
    c.expect(rep.status(Condition::C3) == Status::Holds, "C3 at (0,0,2,1)");
    c.expect(rep.status(Condition::C4) == Status::Holds, "C4 at (0,0,2,1)");

    let ctx = ConditionContext::for_point(inst, &point(&["0", "1", "-1/2", "0"])).unwrap();
    let rep = classify_multiplicity(&ctx, res).unwrap();
    for cond in [Condition::D3, Condition::D4, Condition::D5] {
        c.expect(rep.status(cond) == Status::Holds, format!("{cond} at (0,1,-1/2,0)"));
    }
    for cond in [Condition::D1, Condition::D2] {
        c.expect(rep.status(cond) == Status::Fails, format!("{cond} at (0,1,-1/2,0)"));
    }
}

fn criterion_3(inst: &ProblemInstance, c: &mut Check) {
    let tol = 1e-9;
    let ctx = ConditionContext::for_point(inst, &point(&["0", "0", "2", "1"])).unwrap();
    let c4 = build_family(&ctx, Condition::C4, &point(&["0", "0", "2", "1"])).unwrap();
    let upper = c4.interval.upper.to_f64();
    c.expect((upper - 0.057735026919).abs() < tol, format!("C4 endpoint {upper}"));
    c.expect(c4.interval.lower == Endpoint::Exact(int(0)) && c4.interval.lower_open, "C4 lower end is an open 0");
    // Exactly 1/(10 sqrt 3): between 577350/10^7 and 577351/10^7 and its
    // square times 300 is 1.
    if let Endpoint::Root(r) = &c4.interval.upper {
        c.expect(r.cmp_rat(&ratio(577_350, 10_000_000)) == Ordering::Greater, "C4 endpoint lower bracket");
        c.expect(r.cmp_rat(&ratio(577_351, 10_000_000)) == Ordering::Less, "C4 endpoint upper bracket");
    } else {
        c.expect(false, "C4 endpoint is not the ball bound");
    }

    let ctx = ConditionContext::for_point(inst, &point(&["0", "1", "-1/2", "0"])).unwrap();
    let d4 = build_family(&ctx, Condition::D4, &point(&["0", "-4", "1", "0"])).unwrap();
    let lower = d4.interval.lower.to_f64();
    c.expect((lower + 0.028867513459).abs() < tol, format!("D4 lower endpoint {lower}"));
    c.expect(d4.interval.lower.cmp_exact(&Endpoint::Exact(ratio(-1, 10))) == Ordering::Greater, "max picks the ball bound");
    c.expect(d4.interval.upper == Endpoint::Exact(int(0)), "D4 upper end is 0");
    let d5 = build_family(&ctx, Condition::D5, &point(&["0", "4", "-1", "0"])).unwrap();
    c.expect(d5.interval == d4.interval.negated(), "D5 interval mirrors D4");
    let upper = d5.interval.upper.to_f64();
    c.expect((upper - 0.028867513459).abs() < tol, format!("D5 upper endpoint {upper}"));

    // D3 with d = e_2: slack ratios over the inactive rows give 1/3, the
    // ball bound is 1/(10 sqrt 3), and the smaller one wins.
    let d = point(&["0", "1", "0", "0"]);
    let d3 = build_family(&ctx, Condition::D3, &d).unwrap();
    let x = point(&["0", "1", "-1/2", "0"]);
    let bx = inst.b_mat().mul_vec(&x);
    let bd = inst.b_mat().mul_vec(&d);
    let lambda1 = ctx
        .inactive
        .iter()
        .filter(|&&j| bd[j] != int(0))
        .map(|&j| (&inst.b()[j] - &bx[j]) / if bd[j] < int(0) { -&bd[j] } else { bd[j].clone() })
        .min()
        .unwrap();
    c.expect(lambda1 == ratio(1, 3), format!("lambda_1 = {lambda1}"));
    let bound = d3.interval.upper.to_f64();
    c.expect((bound - inv_10_sqrt3()).abs() < tol, format!("D3 bound {bound}"));
    c.expect(d3.interval.upper.cmp_exact(&Endpoint::Exact(lambda1)) == Ordering::Less, "D3 bound below lambda_1");
    c.expect(d3.interval == d3.interval.negated(), "D3 interval symmetric");
}

fn criterion_4(inst: &ProblemInstance, c: &mut Check) {
    let first = ConditionContext::for_point(inst, &point(&["0", "0", "2", "1"])).unwrap();
    c.expect(first.record.active_set == [0, 2], format!("I = {:?}", first.record.active_set));
    c.expect(
        null_space_vectors(&first.b_ibar_s) == vec![vec![int(2), int(1)]],
        "Null(B_{inactive,S}) basis (2,1)",
    );
    let second = ConditionContext::for_point(inst, &point(&["0", "1", "-1/2", "0"])).unwrap();
    c.expect(second.record.active_set == [0], format!("I = {:?}", second.record.active_set));
}

fn criterion_5(inst: &ProblemInstance, res: &EnumerationResult, c: &mut Check) {
    c.expect(spark(inst.a()) == 3, "spark(A) = 3");
    let b = check_boundedness(inst, res.kstar, &limits()).unwrap();
    c.expect(b.e1 && b.e2 && b.e3 && b.bounded_certified, format!("E1 {} E2 {} E3 {}", b.e1, b.e2, b.e3));
}

fn criterion_6(inst: &ProblemInstance, res: &EnumerationResult, c: &mut Check) -> usize {
    let mut families = 0;
    let mut check_family = |ctx: &ConditionContext<'_>, cond: Condition, d: &[Rat], c: &mut Check| {
        match build_family(ctx, cond, d).and_then(|f| sample_and_verify(inst, &f, FAMILY_SAMPLES)) {
            Ok(members) => {
                families += 1;
                c.expect(members.len() >= 100, format!("{cond}: only {} members", members.len()));
                c.expect(
                    members.iter().all(|m| inst.is_feasible(&m.record.x) && m.record.support == ctx.record.support),
                    format!("{cond}: member failed recheck"),
                );
            }
            Err(e) => c.expect(false, format!("{cond} along {d:?}: {e}")),
        }
    };
    for rec in res.witnesses.values() {
        let ctx = ConditionContext::new(inst, rec.clone());
        let rep = classify_multiplicity(&ctx, res).unwrap();
        for entry in rep.holding() {
            for d in &entry.directions {
                check_family(&ctx, entry.condition, d, c);
            }
        }
    }
    let ctx = ConditionContext::for_point(inst, &point(&["0", "1", "-1/2", "0"])).unwrap();
    check_family(&ctx, Condition::D4, &point(&["0", "-4", "1", "0"]), c);
    check_family(&ctx, Condition::D5, &point(&["0", "4", "-1", "0"]), c);
    check_family(&ctx, Condition::D3, &point(&["0", "1", "0", "0"]), c);
    families
}

struct CorpusRun {
    instance: ProblemInstance,
    result: Result<EnumerationResult, Error>,
}

fn run_corpus() -> (Vec<CorpusRun>, Duration) {
    let start = Instant::now();
    let runs = corpus(CORPUS_SIZE, CORPUS_SEED)
        .into_iter()
        .map(|inst| {
            let result = enumerate_sparsest(&inst, inst.n(), &limits());
            CorpusRun { instance: inst, result }
        })
        .collect();
    (runs, start.elapsed())
}

fn criterion_7(runs: &[CorpusRun], c: &mut Check) -> usize {
    let mut witnesses = 0;
    for (i, run) in runs.iter().enumerate() {
        let res = match &run.result {
            Ok(r) => r,
            Err(e) => {
                c.expect(false, format!("instance {i}: {e}"));
                continue;
            }
        };
        for rec in res.witnesses.values() {
            witnesses += 1;
            let ctx = ConditionContext::new(&run.instance, rec.clone());
            c.expect(check_necessary(&ctx).holds, format!("instance {i}: witness {:?} violates the rank condition", rec.x));
        }
    }
    witnesses
}

fn criterion_8(runs: &[CorpusRun], c: &mut Check) {
    for (i, run) in runs.iter().enumerate() {
        if let Ok(res) = &run.result {
            let ctx = ConditionContext::new(&run.instance, res.max_active_witness.clone());
            c.expect(check_mstar(&ctx), format!("instance {i}: max-active witness has rank-deficient M*"));
        }
    }
}

/// Dual coordinate ascent for `min ||y - A z||^2` s.t. `G z <= h` with
/// `A` of full column rank.
fn float_constrained_ls(a: &DMatrix<f64>, y: &DVector<f64>, g: &DMatrix<f64>, h: &DVector<f64>) -> f64 {
    let e = a.transpose() * a;
    let e_inv = e.clone().try_inverse().expect("full column rank");
    let f = -(a.transpose() * y);
    let p = g * &e_inv * g.transpose();
    let k = h + g * &e_inv * &f;
    let mut lambda = DVector::<f64>::zeros(g.nrows());
    for _ in 0..200_000 {
        let mut change: f64 = 0.0;
        for i in 0..g.nrows() {
            if p[(i, i)] <= 1e-14 {
                continue;
            }
            let row_dot: f64 = (0..g.nrows()).filter(|&j| j != i).map(|j| p[(i, j)] * lambda[j]).sum();
            let next = (-(k[i] + row_dot) / p[(i, i)]).max(0.0);
            change = change.max((next - lambda[i]).abs());
            lambda[i] = next;
        }
        if change < 1e-15 {
            break;
        }
    }
    let z = -(&e_inv * (f + g.transpose() * lambda));
    (y - a * z).norm_squared()
}

fn dense(m: &MatQ) -> DMatrix<f64> {
    DMatrix::from_fn(m.rows(), m.cols(), |r, c| to_f64(&m[(r, c)]))
}

fn criterion_9(c: &mut Check) -> (usize, usize) {
    let mut r = rng(0x5EED_0009);
    let mut qp_cases = 0;
    while qp_cases < 150 {
        let k = r.gen_range(1..=3);
        let m = r.gen_range(k..=4);
        let l = r.gen_range(0..=3);
        let a = common::matrix(&mut r, m, k, false);
        if a.rank() < k {
            continue;
        }
        let g = common::matrix(&mut r, l, k, false);
        let z0: VecQ = (0..k).map(|_| small_rat(&mut r)).collect();
        let h: VecQ = g.mul_vec(&z0).into_iter().map(|v| v + ratio(r.gen_range(0..=5), r.gen_range(1..=5))).collect();
        let y: VecQ = (0..m).map(|_| small_rat(&mut r)).collect();
        let inst = ProblemInstance::new(a.clone(), g.clone(), y.clone(), h.clone(), int(0)).unwrap();
        let support: Vec<usize> = (0..k).collect();
        let exact = min_residual(&RestrictedProblem { instance: &inst, support: &support, forced_active: &[] }, &limits())
            .unwrap()
            .qstar;
        let reference = float_constrained_ls(
            &dense(&a),
            &DVector::from_vec(common::to_f64s(&y)),
            &dense(&g),
            &DVector::from_vec(common::to_f64s(&h)),
        );
        let diff = (to_f64(&exact) - reference).abs();
        c.expect(diff <= 1e-6, format!("qp case {qp_cases}: exact {} vs float {reference}", to_f64(&exact)));
        qp_cases += 1;
    }

    let mut lp_cases = 0;
    while lp_cases < 150 {
        let n = r.gen_range(1..=3);
        let rows = r.gen_range(0..=4);
        let coarse = r.gen_bool(0.5);
        let g = common::matrix(&mut r, rows, n, coarse);
        let h: VecQ = (0..rows).map(|_| small_rat(&mut r)).collect();
        let bound = int(r.gen_range(1..=5));
        let lhs = g.vstack(&MatQ::identity(n)).vstack(&MatQ::identity(n).neg());
        let mut rhs = h;
        rhs.extend(std::iter::repeat_n(bound, 2 * n));
        let objective: VecQ = (0..n).map(|_| common::tiny_int(&mut r)).collect();
        let lp = LpProblem::new(objective.clone(), lhs.clone(), rhs.clone(), MatQ::zeros(0, n), vec![]);
        let best_vertex = Combinations::new(lhs.rows(), n)
            .filter_map(|rows| {
                let (x, kernel) = solve_linear(&lhs.select_rows(&rows), &rows.iter().map(|&i| rhs[i].clone()).collect::<VecQ>())?;
                (kernel.is_empty() && lp.is_feasible(&x)).then(|| zeronorm_core::linalg::dot(&objective, &x))
            })
            .max();
        match (lp_max(&lp), best_vertex) {
            (LpOutcome::Optimal { value, point }, Some(v)) => {
                c.expect(value == v && lp.is_feasible(&point), format!("lp case {lp_cases}: {value} vs {v}"));
            }
            (LpOutcome::Infeasible, None) => {}
            (got, want) => c.expect(false, format!("lp case {lp_cases}: {got:?} vs vertex {want:?}")),
        }
        lp_cases += 1;
    }
    (qp_cases, lp_cases)
}

/// Returns how often each condition held and how many instances were not
/// certified bounded.
fn criterion_10(runs: &[CorpusRun], c: &mut Check) -> (Vec<(Condition, usize)>, usize) {
    let mut held: Vec<(Condition, usize)> = Condition::ALL.iter().map(|&k| (k, 0)).collect();
    let mut uncertified = 0;
    for (i, run) in runs.iter().enumerate() {
        let Ok(res) = &run.result else { continue };
        if res.kstar >= 1 {
            let b = check_boundedness(&run.instance, res.kstar, &limits()).unwrap();
            c.expect(b.e2 == b.e3, format!("instance {i}: E2 = {} but E3 = {}", b.e2, b.e3));
            c.expect(!b.e2 || b.e1, format!("instance {i}: E2 without E1"));
            uncertified += usize::from(!b.bounded_certified);
        }
        for rec in res.witnesses.values().chain([&res.max_active_witness]) {
            let ctx = ConditionContext::new(&run.instance, rec.clone());
            let rep = classify_multiplicity(&ctx, res).unwrap();
            for entry in rep.holding() {
                held.iter_mut().find(|(k, _)| *k == entry.condition).unwrap().1 += 1;
            }
            for (p, q) in [(Condition::C3, Condition::C4), (Condition::D1, Condition::D2), (Condition::D4, Condition::D5)] {
                c.expect(
                    (rep.status(p) == Status::Holds) == (rep.status(q) == Status::Holds),
                    format!("instance {i}: {p} is {:?} but {q} is {:?}", rep.status(p), rep.status(q)),
                );
            }
        }
    }
    (held, uncertified)
}

fn report(n: u32, title: &str, check: Check, detail: String) -> bool {
    let ok = check.failures.is_empty();
    println!("criterion {n:>2} {:<4} {title} ({detail})", if ok { "PASS" } else { "FAIL" });
    for f in check.failures.iter().take(10) {
        println!("    {f}");
    }
    ok
}

fn main() {
    let inst = example();
    let mut all = true;

    let mut c = Check::new();
    let start = Instant::now();
    let res = criterion_1(&inst, &mut c);
    all &= report(1, "example enumeration", c, format!("{:?}", start.elapsed()));

    let mut c = Check::new();
    criterion_2(&inst, &res, &mut c);
    all &= report(2, "example classification", c, String::from("C3, C4, D3, D4, D5 hold; D1, D2 fail"));

    let mut c = Check::new();
    criterion_3(&inst, &mut c);
    all &= report(3, "example intervals", c, String::from("C4, D3, D4, D5 endpoints"));

    let mut c = Check::new();
    criterion_4(&inst, &mut c);
    all &= report(4, "example structure", c, String::from("active sets and inactive-row null space"));

    let mut c = Check::new();
    criterion_5(&inst, &res, &mut c);
    all &= report(5, "spark and boundedness", c, String::from("spark 3, E1 E2 E3"));

    let mut c = Check::new();
    let families = criterion_6(&inst, &res, &mut c);
    all &= report(6, "family verification", c, format!("{families} families x {FAMILY_SAMPLES} members"));

    let (runs, elapsed) = run_corpus();
    let solved = runs.iter().filter(|r| r.result.is_ok()).count();

    let mut c = Check::new();
    let witnesses = criterion_7(&runs, &mut c);
    c.expect(elapsed < Duration::from_secs(600), format!("corpus took {elapsed:?}"));
    all &= report(
        7,
        "necessary rank condition on corpus",
        c,
        format!("{solved}/{} instances, {witnesses} witnesses, {elapsed:?}", runs.len()),
    );

    let mut c = Check::new();
    criterion_8(&runs, &mut c);
    all &= report(8, "max-active witness has full-rank M*", c, format!("{solved} instances"));

    let mut c = Check::new();
    let (qp, lp) = criterion_9(&mut c);
    all &= report(9, "oracle equivalence", c, format!("{qp} least-squares, {lp} LP problems"));

    let mut c = Check::new();
    let (held, uncertified) = criterion_10(&runs, &mut c);
    let counts: Vec<String> = held.iter().map(|(k, n)| format!("{k} {n}")).collect();
    all &= report(
        10,
        "consistency identities",
        c,
        format!("{solved} instances, {uncertified} not certified bounded; holds: {}", counts.join(", ")),
    );

    if !all {
        std::process::exit(1);
    }
}
