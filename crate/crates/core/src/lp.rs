//! Dense bounded-variable LP solver.
//!
//! Two-phase revised primal simplex with an explicit basis inverse. Every
//! variable carries finite bounds `lower <= x <= upper`; nonbasic variables
//! sit at one of their bounds and may flip to the other one without a basis
//! change. Pricing is Dantzig's rule until too many consecutive degenerate
//! pivots are seen, after which Bland's rule takes over until the objective
//! moves again.

use thiserror::Error;

use crate::tolerance;

/// `min objective·x` subject to `eq_rows`, `ineq_rows` (`a·x <= b`) and
/// per-variable bounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DenseLp {
    pub objective: Vec<f64>,
    pub eq_rows: Vec<(Vec<f64>, f64)>,
    pub ineq_rows: Vec<(Vec<f64>, f64)>,
    pub var_bounds: Vec<(f64, f64)>,
}

impl DenseLp {
    /// An LP over `objective.len()` variables, each bounded to `[0, 1]`.
    pub fn unit_box(objective: Vec<f64>) -> Self {
        let n = objective.len();
        DenseLp { objective, var_bounds: vec![(0.0, 1.0); n], ..Default::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq_rows.push((row, rhs));
    }

    pub fn add_le(&mut self, row: Vec<f64>, rhs: f64) {
        self.ineq_rows.push((row, rhs));
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.num_vars();
        if self.var_bounds.len() != n {
            return Err(LpError::DimensionMismatch(format!(
                "{} bounds for {n} variables",
                self.var_bounds.len()
            )));
        }
        for (k, (row, rhs)) in self.eq_rows.iter().chain(&self.ineq_rows).enumerate() {
            if row.len() != n {
                return Err(LpError::DimensionMismatch(format!(
                    "row {k} has {} coefficients for {n} variables",
                    row.len()
                )));
            }
            if !rhs.is_finite() || row.iter().any(|a| !a.is_finite()) {
                return Err(LpError::DimensionMismatch(format!("row {k} has non-finite entries")));
            }
        }
        if self.objective.iter().any(|c| !c.is_finite()) {
            return Err(LpError::DimensionMismatch("non-finite objective coefficient".into()));
        }
        for (var, &(lo, hi)) in self.var_bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(LpError::InvalidBounds { var, lower: lo, upper: hi });
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |row: &[f64]| row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>();
        let eq = self.eq_rows.iter().map(|(r, b)| (dot(r) - b).abs());
        let le = self.ineq_rows.iter().map(|(r, b)| (dot(r) - b).max(0.0));
        let bounds = self
            .var_bounds
            .iter()
            .zip(x)
            .map(|(&(lo, hi), &v)| (lo - v).max(v - hi).max(0.0));
        eq.chain(le).chain(bounds).fold(0.0, f64::max)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
    pub iterations: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("variable {var} has invalid bounds [{lower}, {upper}]")]
    InvalidBounds { var: usize, lower: f64, upper: f64 },
    #[error("iteration limit of {0} pivots exceeded")]
    IterationLimit(usize),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone)]
pub struct SimplexOptions {
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub bland_after: usize,
    /// Pivots between refactorizations of the basis inverse.
    pub refactor_every: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions { max_iterations: 200_000, bland_after: 50, refactor_every: 100 }
    }
}

pub fn solve(lp: &DenseLp) -> Result<LpSolution, LpError> {
    solve_with(lp, &SimplexOptions::default())
}

pub fn solve_with(lp: &DenseLp, options: &SimplexOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let mut simplex = Simplex::new(lp);
    let result = simplex.run(options)?;
    let status = match result {
        PhaseResult::Optimal => LpStatus::Optimal,
        PhaseResult::Infeasible => LpStatus::Infeasible,
        PhaseResult::Unbounded => LpStatus::Unbounded,
    };
    let n = lp.num_vars();
    let mut values = simplex.x[..n].to_vec();
    if status == LpStatus::Optimal {
        for (v, &(lo, hi)) in values.iter_mut().zip(&lp.var_bounds) {
            *v = v.clamp(lo, hi);
        }
        let violation = lp.max_violation(&values);
        if violation > tolerance::FEASIBILITY {
            return Err(LpError::Numerical(format!(
                "optimal basis violates a constraint by {violation:e}"
            )));
        }
    }
    Ok(LpSolution {
        objective_value: lp.objective_value(&values),
        values,
        status,
        iterations: simplex.iterations,
    })
}

enum PhaseResult {
    Optimal,
    Infeasible,
    Unbounded,
}

const NONE: usize = usize::MAX;

struct Simplex {
    m: usize,
    /// Sparse columns of `[A | slacks | artificials]`.
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    cost: Vec<f64>,
    orig_cost: Vec<f64>,
    is_artificial: Vec<bool>,
    b: Vec<f64>,
    x: Vec<f64>,
    at_upper: Vec<bool>,
    /// Basic column of each row.
    basis: Vec<usize>,
    /// Row of each basic column, `NONE` when nonbasic.
    row_of: Vec<usize>,
    /// Row-major `m x m` basis inverse.
    binv: Vec<f64>,
    iterations: usize,
    since_refactor: usize,
}

impl Simplex {
    fn new(lp: &DenseLp) -> Self {
        let n = lp.num_vars();
        let m = lp.eq_rows.len() + lp.ineq_rows.len();
        let rows: Vec<(&[f64], f64, bool)> = lp
            .eq_rows
            .iter()
            .map(|(r, b)| (r.as_slice(), *b, true))
            .chain(lp.ineq_rows.iter().map(|(r, b)| (r.as_slice(), *b, false)))
            .collect();

        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for (i, (row, _, _)) in rows.iter().enumerate() {
            for (j, &a) in row.iter().enumerate() {
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
        }
        let mut lo: Vec<f64> = lp.var_bounds.iter().map(|b| b.0).collect();
        let mut hi: Vec<f64> = lp.var_bounds.iter().map(|b| b.1).collect();
        let mut x = lo.clone();
        let mut orig_cost = lp.objective.clone();
        let mut is_artificial = vec![false; n];

        // Residual with structurals at their lower bounds.
        let residual: Vec<f64> = rows
            .iter()
            .map(|(row, rhs, _)| rhs - row.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>())
            .collect();

        let mut basis = vec![NONE; m];
        let mut binv = vec![0.0; m * m];
        let mut push_col = |col: Vec<(usize, f64)>, l: f64, h: f64, val: f64, art: bool| {
            cols.push(col);
            lo.push(l);
            hi.push(h);
            x.push(val);
            orig_cost.push(0.0);
            is_artificial.push(art);
            cols.len() - 1
        };
        for (i, &(_, _, is_eq)) in rows.iter().enumerate() {
            let r = residual[i];
            if !is_eq {
                let slack_val = r.max(0.0);
                let s = push_col(vec![(i, 1.0)], 0.0, f64::INFINITY, slack_val, false);
                if r >= 0.0 {
                    basis[i] = s;
                    binv[i * m + i] = 1.0;
                    continue;
                }
            }
            let sign = if r >= 0.0 { 1.0 } else { -1.0 };
            let a = push_col(vec![(i, sign)], 0.0, f64::INFINITY, r.abs(), true);
            basis[i] = a;
            binv[i * m + i] = sign;
        }

        let total = cols.len();
        let mut row_of = vec![NONE; total];
        for (i, &c) in basis.iter().enumerate() {
            row_of[c] = i;
        }
        let cost = is_artificial.iter().map(|&a| if a { 1.0 } else { 0.0 }).collect();
        Simplex {
            m,
            cols,
            lo,
            hi,
            cost,
            orig_cost,
            is_artificial,
            b: rows.iter().map(|r| r.1).collect(),
            x,
            at_upper: vec![false; total],
            basis,
            row_of,
            binv,
            iterations: 0,
            since_refactor: 0,
        }
    }

    fn run(&mut self, options: &SimplexOptions) -> Result<PhaseResult, LpError> {
        if self.is_artificial.iter().any(|&a| a) {
            self.iterate(options)?;
            let infeasibility: f64 = (0..self.cols.len())
                .filter(|&j| self.is_artificial[j])
                .map(|j| self.x[j])
                .sum();
            let scale = 1.0 + self.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if infeasibility > tolerance::FEASIBILITY * scale {
                return Ok(PhaseResult::Infeasible);
            }
            for j in 0..self.cols.len() {
                if self.is_artificial[j] {
                    self.hi[j] = 0.0;
                    if self.row_of[j] == NONE {
                        self.x[j] = 0.0;
                        self.at_upper[j] = false;
                    }
                }
            }
        }
        self.cost = self.orig_cost.clone();
        self.refactor()?;
        self.iterate(options)
    }

    fn iterate(&mut self, options: &SimplexOptions) -> Result<PhaseResult, LpError> {
        let m = self.m;
        let mut degenerate_run = 0usize;
        let mut y = vec![0.0; m];
        let mut w = vec![0.0; m];
        let mut verified = false;
        loop {
            if self.iterations >= options.max_iterations {
                return Err(LpError::IterationLimit(options.max_iterations));
            }
            if self.since_refactor >= options.refactor_every {
                self.refactor()?;
            }

            // Duals y = c_B^T B^{-1}.
            y.iter_mut().for_each(|v| *v = 0.0);
            for (i, &bc) in self.basis.iter().enumerate() {
                let c = self.cost[bc];
                if c != 0.0 {
                    let row = &self.binv[i * m..(i + 1) * m];
                    for (yk, &bik) in y.iter_mut().zip(row) {
                        *yk += c * bik;
                    }
                }
            }

            let bland = degenerate_run > options.bland_after;
            let mut entering = NONE;
            let mut best = 0.0;
            for j in 0..self.cols.len() {
                if self.row_of[j] != NONE || self.lo[j] == self.hi[j] {
                    continue;
                }
                let d = self.cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>();
                let gain = if self.at_upper[j] { d } else { -d };
                if gain > tolerance::REDUCED_COST && gain > best {
                    entering = j;
                    best = gain;
                    if bland {
                        break;
                    }
                }
            }

            if entering == NONE {
                // Confirm against a fresh factorization before declaring optimality.
                if verified {
                    return Ok(PhaseResult::Optimal);
                }
                self.refactor()?;
                verified = true;
                continue;
            }
            verified = false;

            // Column w = B^{-1} a_q.
            w.iter_mut().for_each(|v| *v = 0.0);
            for &(r, a) in &self.cols[entering] {
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi += self.binv[i * m + r] * a;
                }
            }

            let sigma = if self.at_upper[entering] { -1.0 } else { 1.0 };
            let mut step = self.hi[entering] - self.lo[entering];
            let mut leave_row = NONE;
            let mut leave_var = if step.is_finite() { entering } else { NONE };
            for i in 0..m {
                let alpha = sigma * w[i];
                let bv = self.basis[i];
                let limit = if alpha > tolerance::PIVOT {
                    (self.x[bv] - self.lo[bv]) / alpha
                } else if alpha < -tolerance::PIVOT && self.hi[bv].is_finite() {
                    (self.hi[bv] - self.x[bv]) / -alpha
                } else {
                    continue;
                };
                let limit = limit.max(0.0);
                let better = limit < step - 1e-12
                    || (limit <= step + 1e-12 && (leave_var == NONE || bv < leave_var));
                if better {
                    step = limit;
                    leave_row = i;
                    leave_var = bv;
                }
            }
            if !step.is_finite() {
                return Ok(PhaseResult::Unbounded);
            }

            self.iterations += 1;
            if step <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }

            self.x[entering] += sigma * step;
            for i in 0..m {
                let bv = self.basis[i];
                self.x[bv] -= sigma * w[i] * step;
            }

            if leave_row == NONE {
                // Bound flip of the entering variable.
                self.at_upper[entering] = !self.at_upper[entering];
                self.x[entering] =
                    if self.at_upper[entering] { self.hi[entering] } else { self.lo[entering] };
                continue;
            }

            let leaving = self.basis[leave_row];
            let to_lower = sigma * w[leave_row] > 0.0;
            self.at_upper[leaving] = !to_lower;
            self.x[leaving] = if to_lower { self.lo[leaving] } else { self.hi[leaving] };
            self.row_of[leaving] = NONE;
            self.basis[leave_row] = entering;
            self.row_of[entering] = leave_row;
            self.at_upper[entering] = false;
            self.pivot_inverse(leave_row, &w);
            self.since_refactor += 1;
        }
    }

    fn pivot_inverse(&mut self, r: usize, w: &[f64]) {
        let m = self.m;
        let piv = w[r];
        for k in 0..m {
            self.binv[r * m + k] /= piv;
        }
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for (i, row) in before.chunks_mut(m).enumerate() {
            let f = w[i];
            if f != 0.0 {
                row.iter_mut().zip(pivot_row.iter()).for_each(|(a, p)| *a -= f * p);
            }
        }
        for (off, row) in after.chunks_mut(m).enumerate() {
            let f = w[r + 1 + off];
            if f != 0.0 {
                row.iter_mut().zip(pivot_row.iter()).for_each(|(a, p)| *a -= f * p);
            }
        }
    }

    /// Rebuild `B^{-1}` by Gauss-Jordan elimination and recompute basic values.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        self.since_refactor = 0;
        if m == 0 {
            return Ok(());
        }
        let mut a = vec![0.0; m * m];
        for (k, &c) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[c] {
                a[i * m + k] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let (p, pv) = (col..m)
                .map(|r| (r, a[r * m + col].abs()))
                .fold((col, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
            if pv < 1e-12 {
                return Err(LpError::Numerical("singular basis".into()));
            }
            if p != col {
                for k in 0..m {
                    a.swap(p * m + k, col * m + k);
                    inv.swap(p * m + k, col * m + k);
                }
            }
            let d = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= d;
                inv[col * m + k] /= d;
            }
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = a[r * m + col];
                if f == 0.0 {
                    continue;
                }
                for k in 0..m {
                    a[r * m + k] -= f * a[col * m + k];
                    inv[r * m + k] -= f * inv[col * m + k];
                }
            }
        }
        self.binv = inv;

        let mut rhs = self.b.clone();
        for j in 0..self.cols.len() {
            if self.row_of[j] == NONE && self.x[j] != 0.0 {
                for &(i, v) in &self.cols[j] {
                    rhs[i] -= v * self.x[j];
                }
            }
        }
        for i in 0..m {
            let row = &self.binv[i * m..(i + 1) * m];
            self.x[self.basis[i]] = row.iter().zip(&rhs).map(|(a, b)| a * b).sum();
        }
        Ok(())
    }
}
