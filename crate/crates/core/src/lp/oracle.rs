//! Exact small-LP oracle by vertex enumeration.
//!
//! Every basic solution is generated by choosing which variables sit at a
//! bound and which inequality rows are tight, solving the square system, and
//! keeping the feasible ones. Variables with an infinite bound are boxed at
//! `±BOX` for enumeration; unboundedness is decided separately by maximizing
//! the objective over the recession cone intersected with the unit box.
//!
//! Cost grows combinatorially, so the oracle refuses models above
//! [`OracleLimits`].

use super::{LinearProgram, LpError, LpSolution, LpStatus, Relation, Sense};

const BOX: f64 = 1e6;
const FEAS_TOL: f64 = 1e-9;
const SINGULAR_TOL: f64 = 1e-10;
const RAY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_vars: usize,
    pub max_constraints: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_vars: 8,
            max_constraints: 12,
        }
    }
}

pub fn oracle_solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    oracle_solve_with_limits(lp, &OracleLimits::default())
}

pub fn oracle_solve_with_limits(lp: &LinearProgram, limits: &OracleLimits) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    let m = lp.num_constraints();
    if n > limits.max_vars || m > limits.max_constraints {
        return Err(LpError::OracleSizeExceeded {
            vars: n,
            constraints: m,
            max_vars: limits.max_vars,
            max_constraints: limits.max_constraints,
        });
    }

    // Internally always maximize.
    let sign = if lp.sense == Sense::Maximize { 1.0 } else { -1.0 };
    let obj: Vec<f64> = lp.objective_vector().iter().map(|c| sign * c).collect();

    let mut eq_rows = Vec::new();
    let mut ineq_rows = Vec::new();
    for c in &lp.constraints {
        let mut dense = vec![0.0; n];
        for &(v, a) in &c.terms {
            dense[v.0] += a;
        }
        // Store every inequality as `a x <= b`.
        match c.relation {
            Relation::Eq => eq_rows.push(Row { a: dense, b: c.rhs }),
            Relation::Le => ineq_rows.push(Row { a: dense, b: c.rhs }),
            Relation::Ge => ineq_rows.push(Row {
                a: dense.iter().map(|v| -v).collect(),
                b: -c.rhs,
            }),
        }
    }
    let Some(eq_rows) = independent_rows(eq_rows) else {
        return Ok(LpSolution::non_optimal(LpStatus::Infeasible, lp.sense, n, 0));
    };

    let boxed: Vec<(f64, f64)> = lp
        .variables
        .iter()
        .map(|v| {
            (
                if v.lower.is_finite() { v.lower } else { -BOX },
                if v.upper.is_finite() { v.upper } else { BOX },
            )
        })
        .collect();
    let Some((_, x)) = best_vertex(&eq_rows, &ineq_rows, &boxed, &obj) else {
        return Ok(LpSolution::non_optimal(LpStatus::Infeasible, lp.sense, n, 0));
    };

    // Ray test over the recession cone.
    let cone_eq: Vec<Row> = eq_rows.iter().map(|r| Row { a: r.a.clone(), b: 0.0 }).collect();
    let cone_ineq: Vec<Row> = ineq_rows.iter().map(|r| Row { a: r.a.clone(), b: 0.0 }).collect();
    let cone_bounds: Vec<(f64, f64)> = lp
        .variables
        .iter()
        .map(|v| {
            (
                if v.lower.is_finite() { 0.0 } else { -1.0 },
                if v.upper.is_finite() { 0.0 } else { 1.0 },
            )
        })
        .collect();
    if let Some((ray_gain, _)) = best_vertex(&cone_eq, &cone_ineq, &cone_bounds, &obj) {
        if ray_gain > RAY_TOL {
            return Ok(LpSolution::non_optimal(LpStatus::Unbounded, lp.sense, n, 0));
        }
    }

    Ok(LpSolution {
        status: LpStatus::Optimal,
        objective_value: lp.objective_at(&x),
        values: x,
        pivots: 0,
    })
}

#[derive(Debug, Clone)]
struct Row {
    a: Vec<f64>,
    b: f64,
}

/// Drops linearly dependent equality rows; `None` if they are inconsistent.
fn independent_rows(rows: Vec<Row>) -> Option<Vec<Row>> {
    let mut echelon: Vec<(Vec<f64>, f64, usize)> = Vec::new();
    let mut keep = Vec::new();
    for row in rows {
        let mut a = row.a.clone();
        let mut b = row.b;
        for (ea, eb, p) in &echelon {
            let f = a[*p] / ea[*p];
            if f != 0.0 {
                for (x, y) in a.iter_mut().zip(ea) {
                    *x -= f * y;
                }
                b -= f * eb;
            }
        }
        let scale = row.a.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let (p, pv) = a
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |acc, (i, v)| if v.abs() > acc.1 { (i, v.abs()) } else { acc });
        if pv <= SINGULAR_TOL * scale {
            if b.abs() > FEAS_TOL * scale.max(row.b.abs()) {
                return None;
            }
            continue;
        }
        echelon.push((a, b, p));
        keep.push(row);
    }
    Some(keep)
}

/// Best objective over all vertices of `{eq, ineq <= , lo <= x <= hi}` with
/// finite bounds.
fn best_vertex(eq: &[Row], ineq: &[Row], bounds: &[(f64, f64)], obj: &[f64]) -> Option<(f64, Vec<f64>)> {
    let n = bounds.len();
    let mut best: Option<(f64, Vec<f64>)> = None;
    // 0 = at lower, 1 = at upper, 2 = determined by the active rows.
    let mut state = vec![0u8; n];
    loop {
        let free: Vec<usize> = (0..n).filter(|&j| state[j] == 2).collect();
        let k = free.len();
        if k >= eq.len() && k - eq.len() <= ineq.len() {
            let mut fixed = vec![0.0; n];
            for j in 0..n {
                fixed[j] = match state[j] {
                    0 => bounds[j].0,
                    1 => bounds[j].1,
                    _ => 0.0,
                };
            }
            for_each_combination(ineq.len(), k - eq.len(), |chosen| {
                let active: Vec<&Row> = eq.iter().chain(chosen.iter().map(|&i| &ineq[i])).collect();
                let Some(x) = solve_active(&active, &free, &fixed) else {
                    return;
                };
                if !feasible(&x, eq, ineq, bounds) {
                    return;
                }
                let val: f64 = obj.iter().zip(&x).map(|(c, v)| c * v).sum();
                if best.as_ref().is_none_or(|(bv, _)| val > *bv + 1e-12) {
                    best = Some((val, x));
                }
            });
        }
        if !advance(&mut state, bounds) {
            break;
        }
    }
    best
}

/// Odometer over variable states, skipping the "at upper" state for fixed
/// variables.
fn advance(state: &mut [u8], bounds: &[(f64, f64)]) -> bool {
    for j in 0..state.len() {
        let fixed = bounds[j].0 == bounds[j].1;
        let next = match (state[j], fixed) {
            (0, true) => 2,
            (s, _) => s + 1,
        };
        if next <= 2 {
            state[j] = next;
            return true;
        }
        state[j] = 0;
    }
    false
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for t in i..k {
            idx[t] = idx[t - 1] + 1;
        }
    }
}

fn solve_active(active: &[&Row], free: &[usize], fixed: &[f64]) -> Option<Vec<f64>> {
    let k = free.len();
    let mut x = fixed.to_vec();
    if k == 0 {
        return Some(x);
    }
    let mut mat = vec![0.0; k * (k + 1)];
    for (r, row) in active.iter().enumerate() {
        let mut rhs = row.b;
        for (j, &a) in row.a.iter().enumerate() {
            rhs -= a * fixed[j];
        }
        for (c, &j) in free.iter().enumerate() {
            mat[r * (k + 1) + c] = row.a[j];
        }
        mat[r * (k + 1) + k] = rhs;
    }
    let w = k + 1;
    for col in 0..k {
        let (p, pv) = (col..k).fold((col, 0.0f64), |acc, r| {
            let v = mat[r * w + col].abs();
            if v > acc.1 {
                (r, v)
            } else {
                acc
            }
        });
        if pv < SINGULAR_TOL {
            return None;
        }
        if p != col {
            for c in 0..w {
                mat.swap(col * w + c, p * w + c);
            }
        }
        for r in 0..k {
            if r != col {
                let f = mat[r * w + col] / mat[col * w + col];
                if f != 0.0 {
                    for c in col..w {
                        mat[r * w + c] -= f * mat[col * w + c];
                    }
                }
            }
        }
    }
    for (c, &j) in free.iter().enumerate() {
        x[j] = mat[c * w + k] / mat[c * w + c];
    }
    Some(x)
}

fn feasible(x: &[f64], eq: &[Row], ineq: &[Row], bounds: &[(f64, f64)]) -> bool {
    let tol = |b: f64| FEAS_TOL * (1.0 + b.abs());
    bounds
        .iter()
        .zip(x)
        .all(|(&(l, u), &v)| v >= l - tol(l) && v <= u + tol(u))
        && eq.iter().all(|r| {
            let lhs: f64 = r.a.iter().zip(x).map(|(a, v)| a * v).sum();
            (lhs - r.b).abs() <= tol(r.b) * 10.0
        })
        && ineq.iter().all(|r| {
            let lhs: f64 = r.a.iter().zip(x).map(|(a, v)| a * v).sum();
            lhs <= r.b + tol(r.b) * 10.0
        })
}

#[cfg(test)]
mod tests {
    use super::super::*;

    fn polygon() -> LinearProgram {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", 0.0, f64::INFINITY);
        let y = lp.add_var("y", 0.0, f64::INFINITY);
        lp.add_constraint("a", vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        lp.add_constraint("b", vec![(x, 3.0), (y, 1.0)], Relation::Le, 6.0);
        lp.add_objective_term(x, 1.0);
        lp.add_objective_term(y, 1.0);
        lp
    }

    #[test]
    fn polygon_matches_vertex_value() {
        let s = oracle_solve(&polygon()).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!((s.objective_value - 2.8).abs() < 1e-9);
    }

    #[test]
    fn redundant_constraint_same_optimum() {
        let mut lp = polygon();
        let (x, y) = (VarId(0), VarId(1));
        // Implied by the first row; creates a degenerate vertex at (0, 2).
        lp.add_constraint("redundant", vec![(x, 2.0), (y, 4.0)], Relation::Le, 8.0);
        let o = oracle_solve(&lp).unwrap();
        let s = solve(&lp).unwrap();
        assert!((o.objective_value - 2.8).abs() < 1e-9);
        assert!((s.objective_value - o.objective_value).abs() < 1e-9);
    }

    #[test]
    fn detects_unbounded_ray() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", 0.0, f64::INFINITY);
        let y = lp.add_var("y", 0.0, f64::INFINITY);
        lp.add_constraint("a", vec![(x, 1.0), (y, -1.0)], Relation::Le, 1.0);
        lp.add_objective_term(y, 1.0);
        assert_eq!(oracle_solve(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn detects_infeasible() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_free_var("x");
        lp.add_constraint("lo", vec![(x, 1.0)], Relation::Ge, 1.0);
        lp.add_constraint("hi", vec![(x, 1.0)], Relation::Le, 0.0);
        assert_eq!(oracle_solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn inconsistent_equalities() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_free_var("x");
        let y = lp.add_free_var("y");
        lp.add_constraint("e1", vec![(x, 1.0), (y, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint("e2", vec![(x, 2.0), (y, 2.0)], Relation::Eq, 3.0);
        assert_eq!(oracle_solve(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn refuses_large_models() {
        let mut lp = LinearProgram::new(Sense::Minimize);
        for i in 0..9 {
            lp.add_var(format!("x{i}"), 0.0, 1.0);
        }
        assert!(matches!(
            oracle_solve(&lp),
            Err(LpError::OracleSizeExceeded { vars: 9, .. })
        ));
    }

    #[test]
    fn free_variable_with_line_in_feasible_set() {
        // Feasible set contains the line x = y; objective constant along it.
        let mut lp = LinearProgram::new(Sense::Minimize);
        let x = lp.add_free_var("x");
        let y = lp.add_free_var("y");
        let z = lp.add_var("z", 0.0, 5.0);
        lp.add_constraint("e", vec![(x, 1.0), (y, -1.0), (z, 1.0)], Relation::Eq, 2.0);
        lp.add_objective_term(z, 1.0);
        let o = oracle_solve(&lp).unwrap();
        assert_eq!(o.status, LpStatus::Optimal);
        assert!(o.objective_value.abs() < 1e-9);
    }
}
