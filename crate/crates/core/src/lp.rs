//! Exact rational linear programming and the cone tests built on it.
//!
//! The solver is a dense two-phase tableau simplex with Bland's rule, so it
//! terminates on degenerate problems, which are the common case here.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::linalg::{add, dot, null_space_vectors, scale, MatQ, VecQ};
use crate::rat::{primitive, Rat};

/// `max objective . x` subject to `ineq_lhs x <= ineq_rhs` and
/// `eq_lhs x = eq_rhs`, with `x` free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LpProblem {
    pub objective: VecQ,
    pub ineq_lhs: MatQ,
    pub ineq_rhs: VecQ,
    pub eq_lhs: MatQ,
    pub eq_rhs: VecQ,
}

impl LpProblem {
    pub fn new(objective: VecQ, ineq_lhs: MatQ, ineq_rhs: VecQ, eq_lhs: MatQ, eq_rhs: VecQ) -> Self {
        let n = objective.len();
        assert_eq!(ineq_lhs.cols(), n, "inequality width mismatch");
        assert_eq!(eq_lhs.cols(), n, "equality width mismatch");
        assert_eq!(ineq_lhs.rows(), ineq_rhs.len(), "inequality rhs length mismatch");
        assert_eq!(eq_lhs.rows(), eq_rhs.len(), "equality rhs length mismatch");
        LpProblem { objective, ineq_lhs, ineq_rhs, eq_lhs, eq_rhs }
    }

    pub fn dim(&self) -> usize {
        self.objective.len()
    }

    /// Exact check of every constraint at `x`.
    pub fn is_feasible(&self, x: &[Rat]) -> bool {
        self.ineq_lhs.mul_vec(x).iter().zip(&self.ineq_rhs).all(|(l, r)| l <= r)
            && self.eq_lhs.mul_vec(x) == self.eq_rhs
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Rat, point: VecQ },
    /// `point` is feasible and `point + t * ray` stays feasible for all
    /// `t >= 0` while the objective grows without bound.
    Unbounded { point: VecQ, ray: VecQ },
    Infeasible,
}

impl LpOutcome {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, LpOutcome::Infeasible)
    }
}

struct Tableau {
    rows: Vec<VecQ>,
    basis: Vec<usize>,
    /// Number of structural columns (the rhs is stored after them).
    width: usize,
}

enum Step {
    Optimal,
    Unbounded(usize),
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Rat {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.rows[row][col].recip();
        for x in &mut self.rows[row] {
            *x *= &inv;
        }
        let pivot_row = self.rows[row].clone();
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i == row || r[col].is_zero() {
                continue;
            }
            let f = r[col].clone();
            for (x, p) in r.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        self.basis[row] = col;
    }

    fn reduced_cost(&self, cost: &[Rat], j: usize) -> Rat {
        let mut d = cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                d -= &cost[b] * &self.rows[i][j];
            }
        }
        d
    }

    /// Maximizes `cost . w` over the current basis. Columns with
    /// `allowed[j] == false` never enter.
    fn run(&mut self, cost: &[Rat], allowed: &[bool]) -> Step {
        loop {
            // Bland: lowest-index improving column enters.
            let entering = (0..self.width)
                .filter(|&j| allowed[j] && !self.basis.contains(&j))
                .find(|&j| self.reduced_cost(cost, j).is_positive());
            let Some(col) = entering else {
                return Step::Optimal;
            };
            let mut best: Option<(usize, Rat)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => {
                        ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi])
                    }
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((row, _)) => self.pivot(row, col),
                None => return Step::Unbounded(col),
            }
        }
    }

    fn basic_solution(&self) -> VecQ {
        let mut w = vec![Rat::zero(); self.width];
        for (i, &b) in self.basis.iter().enumerate() {
            w[b] = self.rhs(i).clone();
        }
        w
    }
}

/// Solves the LP exactly.
pub fn lp_max(p: &LpProblem) -> LpOutcome {
    let n = p.dim();
    let n_ineq = p.ineq_lhs.rows();
    let n_eq = p.eq_lhs.rows();
    let n_rows = n_ineq + n_eq;
    // Columns: x+ (n), x- (n), slacks (n_ineq), artificials (n_rows).
    let structural = 2 * n + n_ineq;
    let width = structural + n_rows;

    let mut rows = Vec::with_capacity(n_rows);
    for i in 0..n_rows {
        let (coeffs, rhs) = if i < n_ineq {
            (p.ineq_lhs.row(i), &p.ineq_rhs[i])
        } else {
            (p.eq_lhs.row(i - n_ineq), &p.eq_rhs[i - n_ineq])
        };
        let mut r = vec![Rat::zero(); width + 1];
        for (j, a) in coeffs.iter().enumerate() {
            r[j] = a.clone();
            r[n + j] = -a;
        }
        if i < n_ineq {
            r[2 * n + i] = Rat::one();
        }
        r[width] = rhs.clone();
        if rhs.is_negative() {
            for x in &mut r {
                *x = -&*x;
            }
        }
        r[structural + i] = Rat::one();
        rows.push(r);
    }
    let mut t = Tableau {
        rows,
        basis: (structural..width).collect(),
        width,
    };

    // Phase 1: drive the artificials to zero.
    let mut phase1_cost = vec![Rat::zero(); width];
    for c in &mut phase1_cost[structural..] {
        *c = -Rat::one();
    }
    let all = vec![true; width];
    t.run(&phase1_cost, &all);
    let infeasibility: Rat = t
        .basis
        .iter()
        .enumerate()
        .filter(|(_, &b)| b >= structural)
        .map(|(i, _)| t.rhs(i).clone())
        .sum();
    if infeasibility.is_positive() {
        return LpOutcome::Infeasible;
    }

    // Pivot remaining (zero-valued) artificials out, dropping redundant rows.
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= structural {
            match (0..structural).find(|&j| !t.rows[i][j].is_zero()) {
                Some(j) => {
                    t.pivot(i, j);
                    i += 1;
                }
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    // Phase 2.
    let mut cost = vec![Rat::zero(); width];
    for j in 0..n {
        cost[j] = p.objective[j].clone();
        cost[n + j] = -&p.objective[j];
    }
    let mut allowed = vec![true; width];
    for a in &mut allowed[structural..] {
        *a = false;
    }
    let step = t.run(&cost, &allowed);
    let w = t.basic_solution();
    let to_x = |w: &[Rat]| -> VecQ { (0..n).map(|j| &w[j] - &w[n + j]).collect() };
    let point = to_x(&w);
    match step {
        Step::Optimal => {
            let value = dot(&p.objective, &point);
            LpOutcome::Optimal { value, point }
        }
        Step::Unbounded(col) => {
            let mut dir = vec![Rat::zero(); width];
            dir[col] = Rat::one();
            for (i, &b) in t.basis.iter().enumerate() {
                dir[b] = -&t.rows[i][col];
            }
            LpOutcome::Unbounded { point, ray: to_x(&dir) }
        }
    }
}

/// Outcome of a cone or strict-feasibility test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeTest {
    pub holds: bool,
    pub witness: Option<VecQ>,
}

/// Decides whether `{t : C t <= 0} = {0}`.
///
/// For every coordinate and sign, maximizes `+-t_j` over the cone cut by
/// the box `-1 <= t <= 1`; the cone is nontrivial iff some optimum is
/// positive. When nontrivial, `witness` is a primitive integer vector in
/// the cone, taken from the first `(coordinate, sign)` pair that succeeds.
pub fn cone_is_trivial(c: &MatQ) -> ConeTest {
    let dim = c.cols();
    if dim == 0 {
        return ConeTest { holds: true, witness: None };
    }
    let box_rows = MatQ::identity(dim).vstack(&MatQ::identity(dim).neg());
    let lhs = c.vstack(&box_rows);
    let mut rhs = vec![Rat::zero(); c.rows()];
    rhs.extend(core::iter::repeat_n(Rat::one(), 2 * dim));
    for j in 0..dim {
        for sign in [Rat::one(), -Rat::one()] {
            let mut objective = vec![Rat::zero(); dim];
            objective[j] = sign;
            let lp = LpProblem::new(objective, lhs.clone(), rhs.clone(), MatQ::zeros(0, dim), vec![]);
            if let LpOutcome::Optimal { value, point } = lp_max(&lp) {
                if value.is_positive() {
                    return ConeTest { holds: false, witness: Some(primitive(&point)) };
                }
            }
        }
    }
    ConeTest { holds: true, witness: None }
}

/// Decides whether some `d` has `P d > 0` componentwise and `Z d = 0`.
///
/// Decided as feasibility of `P d >= 1, Z d = 0`. When `P` has no rows the
/// strict part is vacuous and a nonzero `d` in `Null(Z)` is required
/// instead. The witness is primitive.
pub fn strict_cone_feasible(p: &MatQ, z: &MatQ) -> ConeTest {
    assert_eq!(p.cols(), z.cols(), "strict cone widths differ");
    let dim = p.cols();
    if p.rows() == 0 {
        let basis = null_space_vectors(z);
        return match basis.into_iter().next() {
            Some(v) => ConeTest { holds: true, witness: Some(v) },
            None => ConeTest { holds: false, witness: None },
        };
    }
    let lp = LpProblem::new(
        vec![Rat::zero(); dim],
        p.neg(),
        vec![-Rat::one(); p.rows()],
        z.clone(),
        vec![Rat::zero(); z.rows()],
    );
    match lp_max(&lp) {
        LpOutcome::Optimal { point, .. } | LpOutcome::Unbounded { point, .. } => {
            ConeTest { holds: true, witness: Some(primitive(&point)) }
        }
        LpOutcome::Infeasible => ConeTest { holds: false, witness: None },
    }
}

/// Decides whether some `d` has `P d > 0` componentwise and `M d != 0`.
///
/// After checking that `P d >= 1` is feasible, maximizes `+-r . d` over it
/// for each row `r` of `M`; a positive optimum or an unbounded problem
/// yields a witness.
pub fn exists_nonkernel_point(p: &MatQ, m: &MatQ) -> ConeTest {
    assert_eq!(p.cols(), m.cols(), "nonkernel test widths differ");
    let dim = p.cols();
    let fails = ConeTest { holds: false, witness: None };
    let region = |objective: VecQ| {
        LpProblem::new(
            objective,
            p.neg(),
            vec![-Rat::one(); p.rows()],
            MatQ::zeros(0, dim),
            vec![],
        )
    };
    if lp_max(&region(vec![Rat::zero(); dim])).is_infeasible() {
        return fails;
    }
    for r in 0..m.rows() {
        let row = m.row(r);
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        for sign in [Rat::one(), -Rat::one()] {
            let objective = scale(row, &sign);
            match lp_max(&region(objective.clone())) {
                LpOutcome::Optimal { value, point } if value.is_positive() => {
                    return ConeTest { holds: true, witness: Some(primitive(&point)) };
                }
                LpOutcome::Unbounded { point, ray } => {
                    // Walk along the ray until the objective reaches 1.
                    let at_point = dot(&objective, &point);
                    let slope = dot(&objective, &ray);
                    let step = ((Rat::one() - at_point) / slope).max(Rat::zero());
                    let d = add(&point, &scale(&ray, &step));
                    return ConeTest { holds: true, witness: Some(primitive(&d)) };
                }
                _ => {}
            }
        }
    }
    fails
}
