//! Dense bounded-variable revised simplex.
//!
//! The model is brought to `A x = b, l <= x <= u` by adding one slack per
//! inequality row. A crash basis uses slacks wherever the starting point
//! allows it and artificials elsewhere; phase 1 drives the artificials to
//! zero, phase 2 optimizes the real objective. The basis inverse is stored
//! explicitly and updated by elementary row operations, with periodic
//! refactorization.
//!
//! Pricing is Dantzig's rule with a Harris two-pass ratio test. After
//! `stall_threshold` consecutive pivots without objective progress the solver
//! switches to Bland's smallest-index rule until progress resumes.

use super::{LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense, PIVOT_TOL};

/// Reduced-cost tolerance for optimality.
const DUAL_TOL: f64 = 1e-9;
/// Bound relaxation used by the first pass of the Harris ratio test.
const HARRIS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Hard cap on pivots; `None` picks a size-dependent default.
    pub max_pivots: Option<usize>,
    /// Non-improving pivots tolerated before switching to Bland's rule.
    pub stall_threshold: usize,
    /// Pivots between basis refactorizations.
    pub refactor_interval: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_pivots: None,
            stall_threshold: 40,
            refactor_interval: 64,
        }
    }
}

pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with_options(lp, &SolverOptions::default())
}

pub fn solve_with_options(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let mut t = Tableau::build(lp);
    let max_pivots = opts
        .max_pivots
        .unwrap_or(20_000 + 50 * (t.m + t.ncols));

    // Phase 1.
    let phase1_cost: Vec<f64> = (0..t.ncols)
        .map(|j| if j >= t.first_artificial { 1.0 } else { 0.0 })
        .collect();
    let needs_phase1 = t.basis.iter().any(|&j| j >= t.first_artificial);
    if needs_phase1 {
        match t.run(&phase1_cost, opts, max_pivots)? {
            PhaseEnd::Optimal => {}
            // Phase 1 is bounded below by zero, so a ray here is numerical.
            PhaseEnd::Unbounded => return Err(LpError::SingularBasis(t.pivots)),
        }
        let infeasibility: f64 = (t.first_artificial..t.ncols).map(|j| t.x[j].abs()).sum();
        let bmax = t.b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > 1e-9 * (1.0 + bmax) * (t.m.max(1) as f64) {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible, lp.sense, n, t.pivots));
        }
        t.retire_artificials();
    }

    // Phase 2.
    let sign = match lp.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; t.ncols];
    for (j, c) in lp.objective_vector().into_iter().enumerate() {
        cost[j] = sign * c;
    }
    match t.run(&cost, opts, max_pivots)? {
        PhaseEnd::Optimal => {}
        PhaseEnd::Unbounded => {
            return Ok(LpSolution::non_optimal(LpStatus::Unbounded, lp.sense, n, t.pivots));
        }
    }

    // Basic values drift by round-off; snap them back inside their bounds.
    let values: Vec<f64> = (0..n).map(|j| t.x[j].clamp(t.lo[j], t.up[j])).collect();
    let objective_value = lp.objective_at(&values);
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective_value,
        pivots: t.pivots,
    })
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

struct Tableau {
    m: usize,
    ncols: usize,
    first_artificial: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lo: Vec<f64>,
    up: Vec<f64>,
    b: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    /// Row of each basic column, `usize::MAX` when nonbasic.
    row_of: Vec<usize>,
    /// Row-major dense basis inverse.
    binv: Vec<f64>,
    pivots: usize,
    since_refactor: usize,
}

impl Tableau {
    fn build(lp: &LinearProgram) -> Self {
        let n = lp.num_vars();
        let m = lp.num_constraints();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        let mut lo: Vec<f64> = lp.variables.iter().map(|v| v.lower).collect();
        let mut up: Vec<f64> = lp.variables.iter().map(|v| v.upper).collect();
        let mut b = Vec::with_capacity(m);

        for (i, c) in lp.constraints.iter().enumerate() {
            // Merge duplicate terms so each column has one entry per row.
            let mut merged: Vec<(usize, f64)> = c.terms.iter().map(|&(v, a)| (v.0, a)).collect();
            merged.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < merged.len() {
                let j = merged[k].0;
                let mut a = 0.0;
                while k < merged.len() && merged[k].0 == j {
                    a += merged[k].1;
                    k += 1;
                }
                if a != 0.0 {
                    cols[j].push((i, a));
                }
            }
            b.push(c.rhs);
        }

        // Slacks.
        let mut slack_of_row = vec![usize::MAX; m];
        for (i, c) in lp.constraints.iter().enumerate() {
            let (l, u) = match c.relation {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => continue,
            };
            slack_of_row[i] = cols.len();
            cols.push(vec![(i, 1.0)]);
            lo.push(l);
            up.push(u);
        }
        let first_artificial = cols.len();

        // Nonbasic starting values.
        let mut x: Vec<f64> = lo
            .iter()
            .zip(&up)
            .map(|(&l, &u)| {
                if l.is_finite() {
                    l
                } else if u.is_finite() {
                    u
                } else {
                    0.0
                }
            })
            .collect();
        let mut resid = b.clone();
        for (j, col) in cols.iter().enumerate() {
            if x[j] != 0.0 {
                for &(i, a) in col {
                    resid[i] -= a * x[j];
                }
            }
        }

        let mut basis = vec![usize::MAX; m];
        let mut binv = vec![0.0; m * m];
        for i in 0..m {
            let s = slack_of_row[i];
            // x[s] is currently at its own starting value (0); taking the slack
            // into the basis moves it to resid[i] + x[s].
            if s != usize::MAX {
                let val = resid[i] + x[s];
                if val >= lo[s] && val <= up[s] {
                    x[s] = val;
                    basis[i] = s;
                    binv[i * m + i] = 1.0;
                }
            }
        }
        for i in 0..m {
            let j = cols.len();
            let sgn = if resid[i] >= 0.0 { 1.0 } else { -1.0 };
            cols.push(vec![(i, sgn)]);
            lo.push(0.0);
            if basis[i] == usize::MAX {
                up.push(f64::INFINITY);
                x.push(resid[i].abs());
                basis[i] = j;
                binv[i * m + i] = sgn;
            } else {
                up.push(0.0);
                x.push(0.0);
            }
        }

        let ncols = cols.len();
        let mut row_of = vec![usize::MAX; ncols];
        for (i, &j) in basis.iter().enumerate() {
            row_of[j] = i;
        }
        Self {
            m,
            ncols,
            first_artificial,
            cols,
            lo,
            up,
            b,
            x,
            basis,
            row_of,
            binv,
            pivots: 0,
            since_refactor: 0,
        }
    }

    fn is_basic(&self, j: usize) -> bool {
        self.row_of[j] != usize::MAX
    }

    /// `B^{-1} A_j`.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        for &(i, a) in &self.cols[j] {
            for (r, al) in alpha.iter_mut().enumerate() {
                *al += self.binv[r * m + i] * a;
            }
        }
        alpha
    }

    /// `c_B^T B^{-1}`.
    fn btran(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for r in 0..m {
            let cb = cost[self.basis[r]];
            if cb != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yi, &v) in y.iter_mut().zip(row) {
                    *yi += cb * v;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        cost[j] - self.cols[j].iter().map(|&(i, a)| y[i] * a).sum::<f64>()
    }

    /// Direction (+1 increase, -1 decrease) in which nonbasic `j` improves the
    /// objective, if any.
    fn improving_direction(&self, j: usize, d: f64) -> Option<f64> {
        let (l, u, x) = (self.lo[j], self.up[j], self.x[j]);
        if l == u {
            return None;
        }
        if d < -DUAL_TOL && x < u {
            Some(1.0)
        } else if d > DUAL_TOL && x > l {
            Some(-1.0)
        } else {
            None
        }
    }

    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.m;
        // Dense B, then Gauss-Jordan with partial pivoting on [B | I].
        let mut a = vec![0.0; m * m];
        for (r, &j) in self.basis.iter().enumerate() {
            for &(i, v) in &self.cols[j] {
                a[i * m + r] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut p = col;
            let mut best = a[col * m + col].abs();
            for r in col + 1..m {
                let v = a[r * m + col].abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best < 1e-13 {
                return Err(LpError::SingularBasis(self.pivots));
            }
            if p != col {
                for k in 0..m {
                    a.swap(col * m + k, p * m + k);
                    inv.swap(col * m + k, p * m + k);
                }
            }
            let piv = a[col * m + col];
            for k in 0..m {
                a[col * m + k] /= piv;
                inv[col * m + k] /= piv;
            }
            for r in 0..m {
                if r != col {
                    let f = a[r * m + col];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[col * m + k];
                            inv[r * m + k] -= f * inv[col * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        self.since_refactor = 0;
        self.recompute_basic_values();
        Ok(())
    }

    /// Recomputes basic values from the nonbasic ones, with one round of
    /// iterative refinement.
    fn recompute_basic_values(&mut self) {
        let m = self.m;
        for _ in 0..2 {
            let mut resid = self.b.clone();
            for (j, col) in self.cols.iter().enumerate() {
                let xj = self.x[j];
                if xj != 0.0 {
                    for &(i, a) in col {
                        resid[i] -= a * xj;
                    }
                }
            }
            for r in 0..m {
                let row = &self.binv[r * m..(r + 1) * m];
                let delta: f64 = row.iter().zip(&resid).map(|(a, b)| a * b).sum();
                let j = self.basis[r];
                self.x[j] += delta;
            }
        }
    }

    fn pivot_update(&mut self, alpha: &[f64], r: usize) {
        let m = self.m;
        let piv = alpha[r];
        let (before, rest) = self.binv.split_at_mut(r * m);
        let (pivot_row, after) = rest.split_at_mut(m);
        for v in pivot_row.iter_mut() {
            *v /= piv;
        }
        for (i, row) in before.chunks_mut(m).enumerate() {
            let f = alpha[i];
            if f != 0.0 {
                for (x, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= f * p;
                }
            }
        }
        for (k, row) in after.chunks_mut(m).enumerate() {
            let f = alpha[r + 1 + k];
            if f != 0.0 {
                for (x, &p) in row.iter_mut().zip(pivot_row.iter()) {
                    *x -= f * p;
                }
            }
        }
    }

    fn objective(&self, cost: &[f64]) -> f64 {
        cost.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    fn run(&mut self, cost: &[f64], opts: &SolverOptions, max_pivots: usize) -> Result<PhaseEnd, LpError> {
        let mut bland = false;
        let mut stall = 0usize;
        let mut last_obj = self.objective(cost);
        let mut verified_once = false;

        loop {
            if self.pivots >= max_pivots {
                return Err(LpError::IterationLimit(max_pivots));
            }
            let y = self.btran(cost);

            // Pricing.
            let mut entering: Option<(usize, f64)> = None;
            let mut best_score = 0.0;
            for j in 0..self.ncols {
                if self.is_basic(j) {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if let Some(dir) = self.improving_direction(j, d) {
                    if bland {
                        entering = Some((j, dir));
                        break;
                    }
                    if d.abs() > best_score {
                        best_score = d.abs();
                        entering = Some((j, dir));
                    }
                }
            }
            let Some((q, dir)) = entering else {
                // Confirm optimality on a fresh factorization before stopping.
                if verified_once || self.since_refactor == 0 {
                    return Ok(PhaseEnd::Optimal);
                }
                self.refactor()?;
                verified_once = true;
                continue;
            };
            verified_once = false;

            let alpha = self.ftran(q);
            let step = self.ratio_test(&alpha, q, dir, bland);
            let Some((theta, leave)) = step else {
                // A ray seen through a drifted inverse may be an artifact.
                if self.since_refactor > 0 {
                    self.refactor()?;
                    continue;
                }
                return Ok(PhaseEnd::Unbounded);
            };

            // Apply the step.
            self.x[q] += dir * theta;
            if theta != 0.0 {
                for (r, &a) in alpha.iter().enumerate() {
                    if a != 0.0 {
                        let j = self.basis[r];
                        self.x[j] -= dir * theta * a;
                    }
                }
            }
            match leave {
                None => {
                    // Bound flip: snap the entering variable onto its bound.
                    self.x[q] = if dir > 0.0 { self.up[q] } else { self.lo[q] };
                }
                Some((r, to_upper)) => {
                    let out = self.basis[r];
                    self.x[out] = if to_upper { self.up[out] } else { self.lo[out] };
                    self.pivot_update(&alpha, r);
                    self.basis[r] = q;
                    self.row_of[q] = r;
                    self.row_of[out] = usize::MAX;
                    self.since_refactor += 1;
                }
            }
            self.pivots += 1;
            if self.since_refactor >= opts.refactor_interval {
                self.refactor()?;
            }

            let obj = self.objective(cost);
            if obj < last_obj - 1e-12 * (1.0 + last_obj.abs()) {
                stall = 0;
                bland = false;
            } else {
                stall += 1;
                if stall >= opts.stall_threshold {
                    bland = true;
                }
            }
            last_obj = obj;
        }
    }

    /// Returns the step length and the leaving row (with the bound it leaves
    /// at), or `None` for the leaving row when the entering variable reaches
    /// its own opposite bound first. `None` overall means unbounded.
    fn ratio_test(&self, alpha: &[f64], q: usize, dir: f64, bland: bool) -> Option<(f64, Option<(usize, bool)>)> {
        let flip = self.up[q] - self.lo[q];
        let flip = if flip.is_finite() { Some(flip) } else { None };

        // Rate of change of each basic variable per unit step.
        let rate = |r: usize| -dir * alpha[r];
        let exact_ratio = |r: usize| -> Option<(f64, bool)> {
            let a = rate(r);
            if a.abs() <= PIVOT_TOL {
                return None;
            }
            let j = self.basis[r];
            if a < 0.0 && self.lo[j].is_finite() {
                Some((((self.x[j] - self.lo[j]) / -a).max(0.0), false))
            } else if a > 0.0 && self.up[j].is_finite() {
                Some((((self.up[j] - self.x[j]) / a).max(0.0), true))
            } else {
                None
            }
        };

        if bland {
            let mut best: Option<(f64, usize, bool)> = None;
            for r in 0..self.m {
                if let Some((t, up)) = exact_ratio(r) {
                    let better = match best {
                        None => true,
                        Some((bt, br, _)) => {
                            t < bt - 1e-12 || (t <= bt + 1e-12 && self.basis[r] < self.basis[br])
                        }
                    };
                    if better {
                        best = Some((t, r, up));
                    }
                }
            }
            return match (best, flip) {
                (Some((t, r, up)), Some(f)) if t < f => Some((t, Some((r, up)))),
                (Some((t, r, up)), None) => Some((t, Some((r, up)))),
                (_, Some(f)) => Some((f, None)),
                (None, None) => None,
            };
        }

        // Harris pass 1: largest step keeping every basic within relaxed bounds.
        let mut theta_max = f64::INFINITY;
        for r in 0..self.m {
            let a = rate(r);
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[r];
            let t = if a < 0.0 && self.lo[j].is_finite() {
                (self.x[j] - self.lo[j] + HARRIS_TOL) / -a
            } else if a > 0.0 && self.up[j].is_finite() {
                (self.up[j] - self.x[j] + HARRIS_TOL) / a
            } else {
                continue;
            };
            theta_max = theta_max.min(t);
        }
        if let Some(f) = flip {
            if f <= theta_max {
                return Some((f, None));
            }
        }
        if theta_max == f64::INFINITY {
            return None;
        }
        // Pass 2: among rows whose exact ratio fits, take the largest pivot.
        let mut best: Option<(f64, usize, bool, f64)> = None;
        for (r, a) in alpha.iter().enumerate().take(self.m) {
            if let Some((t, up)) = exact_ratio(r) {
                if t <= theta_max {
                    let mag = a.abs();
                    if best.is_none_or(|(_, _, _, bm)| mag > bm) {
                        best = Some((t, r, up, mag));
                    }
                }
            }
        }
        best.map(|(t, r, up, _)| (t, Some((r, up))))
    }

    /// After phase 1: fix artificials at zero and pivot basic ones out where a
    /// structural or slack column can replace them.
    fn retire_artificials(&mut self) {
        for j in self.first_artificial..self.ncols {
            self.lo[j] = 0.0;
            self.up[j] = 0.0;
            if !self.is_basic(j) {
                self.x[j] = 0.0;
            }
        }
        let m = self.m;
        for r in 0..m {
            let art = self.basis[r];
            if art < self.first_artificial {
                continue;
            }
            let row = self.binv[r * m..(r + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..self.first_artificial {
                if self.is_basic(j) {
                    continue;
                }
                let v: f64 = self.cols[j].iter().map(|&(i, a)| row[i] * a).sum();
                if v.abs() > 1e-7 && best.is_none_or(|(_, bv)| v.abs() > bv) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = best {
                let alpha = self.ftran(j);
                self.pivot_update(&alpha, r);
                self.basis[r] = j;
                self.row_of[j] = r;
                self.row_of[art] = usize::MAX;
                self.x[art] = 0.0;
                self.since_refactor += 1;
            }
        }
        // Basic values are unchanged by degenerate swaps, but refresh them to
        // clear phase-1 drift.
        let _ = self.refactor();
    }
}
