//! Dense two-phase primal simplex with bounded variables.
//!
//! Problems are `minimize c^T v` subject to rows `a_i^T v <= b_i` or
//! `a_i^T v = b_i`, with per-variable bounds `lo_j <= v_j <= hi_j` (either side
//! may be infinite). Bounds are handled inside the ratio test and never become
//! rows, so a box-constrained problem with few rows stays a small tableau no
//! matter how many variables it has. The regression fits rely on this.
//!
//! Pricing uses the largest reduced cost until `2 (rows + cols)` iterations
//! have passed and then switches to Bland's smallest-index rule, which
//! guarantees termination.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Mixed absolute/relative feasibility tolerance: a row is satisfied when it
/// is violated by at most `FEAS_TOL * (1 + max|b|)`.
pub const FEAS_TOL: f64 = 1e-7;

const OPT_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-11;
const RATIO_TIE: f64 = 1e-12;
const REFRESH_EVERY: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    LessEq,
    Equal,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("inconsistent dimensions: {0}")]
    Dimension(String),
    #[error("non-finite problem data")]
    NonFinite,
    #[error("problem is infeasible")]
    Infeasible,
    #[error("problem is unbounded")]
    Unbounded,
    #[error("iteration cap of {0} reached")]
    MaxIterations(usize),
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

/// A dense linear program. Variables default to free.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    objective: Vec<f64>,
    /// Row-major, `rows() x vars()`.
    matrix: Vec<f64>,
    rhs: Vec<f64>,
    kinds: Vec<RowKind>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            matrix: Vec::new(),
            rhs: Vec::new(),
            kinds: Vec::new(),
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn vars(&self) -> usize {
        self.objective.len()
    }

    pub fn rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.vars();
        &self.matrix[i * n..(i + 1) * n]
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn kinds(&self) -> &[RowKind] {
        &self.kinds
    }

    pub fn bounds(&self, j: usize) -> (f64, f64) {
        (self.lower[j], self.upper[j])
    }

    fn push_row(&mut self, coeffs: &[f64], rhs: f64, kind: RowKind) -> Result<(), LpError> {
        if coeffs.len() != self.vars() {
            return Err(LpError::Dimension(format!(
                "row has {} coefficients, problem has {} variables",
                coeffs.len(),
                self.vars()
            )));
        }
        self.matrix.extend_from_slice(coeffs);
        self.rhs.push(rhs);
        self.kinds.push(kind);
        Ok(())
    }

    /// Adds `coeffs . v <= rhs`.
    pub fn add_le(&mut self, coeffs: &[f64], rhs: f64) -> Result<(), LpError> {
        self.push_row(coeffs, rhs, RowKind::LessEq)
    }

    /// Adds `coeffs . v = rhs`.
    pub fn add_eq(&mut self, coeffs: &[f64], rhs: f64) -> Result<(), LpError> {
        self.push_row(coeffs, rhs, RowKind::Equal)
    }

    pub fn set_bounds(&mut self, j: usize, lo: f64, hi: f64) -> Result<(), LpError> {
        if j >= self.vars() {
            return Err(LpError::Dimension(format!("variable {j} out of range")));
        }
        if lo.is_nan() || hi.is_nan() || lo > hi || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(LpError::Dimension(format!(
                "bad bounds [{lo}, {hi}] for variable {j}"
            )));
        }
        self.lower[j] = lo;
        self.upper[j] = hi;
        Ok(())
    }

    /// Largest violation of rows and bounds at `v`.
    pub fn max_violation(&self, v: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.rows() {
            let lhs: f64 = self.row(i).iter().zip(v).map(|(a, x)| a * x).sum();
            let gap = lhs - self.rhs[i];
            worst = worst.max(match self.kinds[i] {
                RowKind::LessEq => gap,
                RowKind::Equal => gap.abs(),
            });
        }
        for (j, &x) in v.iter().enumerate() {
            worst = worst.max(self.lower[j] - x).max(x - self.upper[j]);
        }
        worst
    }

    /// Tolerance used to call a point feasible.
    pub fn feasibility_tolerance(&self) -> f64 {
        let bmax = self.rhs.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        FEAS_TOL * (1.0 + bmax)
    }

    pub fn objective_at(&self, v: &[f64]) -> f64 {
        self.objective.iter().zip(v).map(|(c, x)| c * x).sum()
    }

    fn validate(&self) -> Result<(), LpError> {
        let finite = self
            .objective
            .iter()
            .chain(&self.matrix)
            .chain(&self.rhs)
            .all(|v| v.is_finite());
        if !finite {
            return Err(LpError::NonFinite);
        }
        if self.matrix.len() != self.rows() * self.vars() {
            return Err(LpError::Dimension("matrix size mismatch".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; empty unless optimal.
    pub x: Vec<f64>,
    pub objective_value: f64,
    /// Row multipliers `y` with `c - A^T y` the reduced costs. Nonpositive on
    /// `<=` rows at an optimum of a minimization.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

impl LpSolution {
    /// The solution if optimal, otherwise the matching error.
    pub fn optimal(self) -> Result<LpSolution, LpError> {
        match self.status {
            LpStatus::Optimal => Ok(self),
            LpStatus::Infeasible => Err(LpError::Infeasible),
            LpStatus::Unbounded => Err(LpError::Unbounded),
        }
    }

    fn failed(status: LpStatus, iterations: usize) -> Self {
        LpSolution {
            status,
            x: Vec::new(),
            objective_value: f64::NAN,
            duals: Vec::new(),
            iterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SimplexOptions {
    /// Defaults to `50 (rows + cols)`.
    pub max_iterations: Option<usize>,
    /// Defaults to `2 (rows + cols)`.
    pub bland_after: Option<usize>,
}

/// Solves `prob` with a fresh [`SimplexSolver`].
pub fn lp_solve(prob: &LpProblem) -> Result<LpSolution, LpError> {
    SimplexSolver::default().solve(prob)
}

/// Owns the tableau workspace; reuse it for a sequence of solves.
#[derive(Debug, Default)]
pub struct SimplexSolver {
    options: SimplexOptions,
    tableau: Vec<f64>,
}

impl SimplexSolver {
    pub fn new(options: SimplexOptions) -> Self {
        SimplexSolver {
            options,
            tableau: Vec::new(),
        }
    }

    pub fn solve(&mut self, prob: &LpProblem) -> Result<LpSolution, LpError> {
        prob.validate()?;
        let mut tableau = std::mem::take(&mut self.tableau);
        let mut state = Tableau::build(prob, &mut tableau);
        let size = prob.rows() + prob.vars();
        let cap = self.options.max_iterations.unwrap_or(50 * size.max(1));
        let bland_after = self.options.bland_after.unwrap_or(2 * size);
        let result = state.run(prob, cap, bland_after);
        self.tableau = tableau;
        result
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau<'a> {
    m: usize,
    n: usize,
    cols: usize,
    t: &'a mut Vec<f64>,
    /// `B^{-1} b`.
    beta: Vec<f64>,
    x: Vec<f64>,
    lo: Vec<f64>,
    hi: Vec<f64>,
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    d: Vec<f64>,
    art_start: usize,
    iterations: usize,
    pivots_since_refresh: usize,
}

impl<'a> Tableau<'a> {
    fn build(prob: &LpProblem, t: &'a mut Vec<f64>) -> Self {
        let (m, n) = (prob.rows(), prob.vars());
        let mut x = vec![0.0; n + m];
        let mut lo = Vec::with_capacity(n + m);
        let mut hi = Vec::with_capacity(n + m);
        for j in 0..n {
            let (l, h) = prob.bounds(j);
            x[j] = 0.0f64.clamp(l, h);
            lo.push(l);
            hi.push(h);
        }
        for kind in &prob.kinds {
            lo.push(0.0);
            hi.push(match kind {
                RowKind::LessEq => f64::INFINITY,
                RowKind::Equal => 0.0,
            });
        }
        // Rows whose logical would start outside its bounds get an artificial.
        let mut residual = vec![0.0; m];
        let mut artificial_sign = Vec::new();
        for i in 0..m {
            let r = prob.rhs[i]
                - prob
                    .row(i)
                    .iter()
                    .zip(&x[..n])
                    .map(|(a, v)| a * v)
                    .sum::<f64>();
            residual[i] = r;
            let ok = r >= lo[n + i] && r <= hi[n + i];
            if !ok {
                artificial_sign.push((i, if r >= 0.0 { 1.0 } else { -1.0 }));
            }
        }
        let k = artificial_sign.len();
        let cols = n + m + k;
        t.clear();
        t.resize(m * cols, 0.0);
        let mut basis: Vec<usize> = (n..n + m).collect();
        let mut beta = prob.rhs.clone();
        for i in 0..m {
            t[i * cols..i * cols + n].copy_from_slice(prob.row(i));
            t[i * cols + n + i] = 1.0;
        }
        x.resize(cols, 0.0);
        for (a, &(i, sign)) in artificial_sign.iter().enumerate() {
            let col = n + m + a;
            let row = &mut t[i * cols..(i + 1) * cols];
            row[col] = sign;
            // Make the artificial the basic column of this row.
            for v in row.iter_mut() {
                *v *= sign;
            }
            beta[i] *= sign;
            basis[i] = col;
            lo.push(0.0);
            hi.push(f64::INFINITY);
        }
        for i in 0..m {
            if basis[i] == n + i {
                x[n + i] = residual[i];
            } else {
                x[n + i] = 0.0;
                x[basis[i]] = residual[i].abs();
            }
        }
        let mut is_basic = vec![false; cols];
        for &b in &basis {
            is_basic[b] = true;
        }
        Tableau {
            m,
            n,
            cols,
            t,
            beta,
            x,
            lo,
            hi,
            basis,
            is_basic,
            d: vec![0.0; cols],
            art_start: n + m,
            iterations: 0,
            pivots_since_refresh: 0,
        }
    }

    fn run(
        &mut self,
        prob: &LpProblem,
        cap: usize,
        bland_after: usize,
    ) -> Result<LpSolution, LpError> {
        if self.cols > self.art_start {
            let mut cost = vec![0.0; self.cols];
            for c in cost.iter_mut().skip(self.art_start) {
                *c = 1.0;
            }
            self.price(&cost);
            self.phase(cap, bland_after)?;
            self.refresh();
            let infeas: f64 = (self.art_start..self.cols).map(|j| self.x[j].abs()).sum();
            if infeas > prob.feasibility_tolerance() {
                return Ok(LpSolution::failed(LpStatus::Infeasible, self.iterations));
            }
            for j in self.art_start..self.cols {
                self.hi[j] = 0.0;
                if !self.is_basic[j] {
                    self.x[j] = 0.0;
                }
            }
        }
        let mut cost = vec![0.0; self.cols];
        cost[..self.n].copy_from_slice(&prob.objective);
        self.price(&cost);
        if let PhaseEnd::Unbounded = self.phase(cap, bland_after)? {
            return Ok(LpSolution::failed(LpStatus::Unbounded, self.iterations));
        }
        self.refresh();

        let x: Vec<f64> = self.x[..self.n].to_vec();
        let violation = prob.max_violation(&x);
        if violation > prob.feasibility_tolerance() {
            return Err(LpError::Numerical(format!(
                "final point violates constraints by {violation:e}"
            )));
        }
        // Reduced costs are invariant under row scaling, so the logical of row
        // `i` prices at `-y_i` whether or not the row was negated.
        let duals = (0..self.m).map(|i| -self.d[self.n + i]).collect();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective_value: prob.objective_at(&x),
            x,
            duals,
            iterations: self.iterations,
        })
    }

    /// Reduced costs `d = cost - cost_B^T T`.
    fn price(&mut self, cost: &[f64]) {
        self.d.copy_from_slice(cost);
        for i in 0..self.m {
            let cb = cost[self.basis[i]];
            if cb != 0.0 {
                let row = &self.t[i * self.cols..(i + 1) * self.cols];
                for (d, &a) in self.d.iter_mut().zip(row) {
                    *d -= cb * a;
                }
            }
        }
        for &b in &self.basis {
            self.d[b] = 0.0;
        }
    }

    /// Recomputes basic values from `B^{-1} b` and the nonbasic values.
    fn refresh(&mut self) {
        for i in 0..self.m {
            let row = &self.t[i * self.cols..(i + 1) * self.cols];
            let mut v = self.beta[i];
            for j in 0..self.cols {
                if !self.is_basic[j] && self.x[j] != 0.0 {
                    v -= row[j] * self.x[j];
                }
            }
            self.x[self.basis[i]] = v;
        }
        self.pivots_since_refresh = 0;
    }

    fn entering(&self, bland: bool) -> Option<(usize, f64)> {
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.cols {
            if self.is_basic[j] || self.lo[j] == self.hi[j] {
                continue;
            }
            let dj = self.d[j];
            let dir = if dj < -OPT_TOL && self.x[j] < self.hi[j] {
                1.0
            } else if dj > OPT_TOL && self.x[j] > self.lo[j] {
                -1.0
            } else {
                continue;
            };
            if bland {
                return Some((j, dir));
            }
            if best.is_none_or(|(_, _, s)| dj.abs() > s) {
                best = Some((j, dir, dj.abs()));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn phase(&mut self, cap: usize, bland_after: usize) -> Result<PhaseEnd, LpError> {
        loop {
            if self.iterations >= cap {
                return Err(LpError::MaxIterations(cap));
            }
            let bland = self.iterations >= bland_after;
            let Some((q, dir)) = self.entering(bland) else {
                return Ok(PhaseEnd::Optimal);
            };
            self.iterations += 1;

            let flip = if dir > 0.0 {
                self.hi[q] - self.x[q]
            } else {
                self.x[q] - self.lo[q]
            };
            let mut leave: Option<(usize, f64, f64)> = None; // (row, ratio, |alpha|)
            for i in 0..self.m {
                let alpha = dir * self.t[i * self.cols + q];
                if alpha.abs() <= PIVOT_TOL {
                    continue;
                }
                let b = self.basis[i];
                let room = if alpha > 0.0 {
                    self.x[b] - self.lo[b]
                } else {
                    self.hi[b] - self.x[b]
                };
                if room == f64::INFINITY {
                    continue;
                }
                let ratio = room.max(0.0) / alpha.abs();
                let better = match leave {
                    None => true,
                    Some((r, best, mag)) => {
                        if ratio < best - RATIO_TIE {
                            true
                        } else if ratio <= best + RATIO_TIE {
                            if bland {
                                b < self.basis[r]
                            } else {
                                alpha.abs() > mag
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio, alpha.abs()));
                }
            }

            let step = match leave {
                Some((_, ratio, _)) if ratio < flip => ratio,
                _ => flip,
            };
            if step == f64::INFINITY {
                return Ok(PhaseEnd::Unbounded);
            }
            if step > 0.0 {
                self.x[q] += dir * step;
                for i in 0..self.m {
                    let a = self.t[i * self.cols + q];
                    if a != 0.0 {
                        self.x[self.basis[i]] -= dir * step * a;
                    }
                }
            }
            match leave {
                Some((r, ratio, _)) if ratio < flip => {
                    let alpha = dir * self.t[r * self.cols + q];
                    let b = self.basis[r];
                    self.x[b] = if alpha > 0.0 { self.lo[b] } else { self.hi[b] };
                    self.pivot(r, q);
                }
                _ => {
                    // Bound flip: the entering variable reaches its other bound.
                    self.x[q] = if dir > 0.0 { self.hi[q] } else { self.lo[q] };
                }
            }
        }
    }

    fn pivot(&mut self, r: usize, q: usize) {
        let cols = self.cols;
        let piv = self.t[r * cols + q];
        {
            let row = &mut self.t[r * cols..(r + 1) * cols];
            for v in row.iter_mut() {
                *v /= piv;
            }
            row[q] = 1.0;
        }
        self.beta[r] /= piv;
        let (before, rest) = self.t.split_at_mut(r * cols);
        let (prow, after) = rest.split_at_mut(cols);
        for (i, row) in before
            .chunks_exact_mut(cols)
            .chain(after.chunks_exact_mut(cols))
            .enumerate()
        {
            let i = if i < r { i } else { i + 1 };
            let f = row[q];
            if f != 0.0 {
                for (v, &p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
                row[q] = 0.0;
                self.beta[i] -= f * self.beta[r];
            }
        }
        let f = self.d[q];
        if f != 0.0 {
            for (v, &p) in self.d.iter_mut().zip(prow.iter()) {
                *v -= f * p;
            }
            self.d[q] = 0.0;
        }
        let old = self.basis[r];
        self.is_basic[old] = false;
        self.is_basic[q] = true;
        self.basis[r] = q;
        self.pivots_since_refresh += 1;
        if self.pivots_since_refresh >= REFRESH_EVERY {
            self.refresh();
        }
    }
}
