use super::{
    DispatchError, DispatchMode, DispatchProblem, DispatchSolution, DR_OFFSETS,
};
use crate::grid_model::GridError;
use crate::lp::{self, LinearProgram, LpStatus, Relation, Sense, VarId};

/// Variable handles of a built window model, `[entity][t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VarIndex {
    pub gen_ids: Vec<usize>,
    pub p: Vec<Vec<VarId>>,
    pub theta: Vec<Vec<VarId>>,
    pub flow: Vec<Vec<VarId>>,
    /// `dr[class][bus][t]`; `None` where the participation cap is zero.
    pub dr: [Vec<Vec<Option<VarId>>>; 3],
}

/// A built window LP plus what is needed to read its solution back.
#[derive(Debug, Clone)]
pub struct DispatchModel {
    pub lp: LinearProgram,
    pub index: VarIndex,
    pub mode: DispatchMode,
    pub window_start: usize,
    pub horizon: usize,
    pub demand_nt: Vec<Vec<f64>>,
    pub carry_in_nt: Vec<Vec<f64>>,
    pub dr_costs: [f64; 3],
    pub dr_fraction: f64,
}

/// SCED window: generation cost only, balance against forecast demand plus
/// any carried-in arrivals.
pub fn build_sced(problem: &DispatchProblem<'_>, window_start: usize) -> Result<DispatchModel, DispatchError> {
    if problem.mode != DispatchMode::Sced {
        return Err(DispatchError::WrongMode(problem.mode, DispatchMode::Sced));
    }
    build(problem, window_start)
}

/// SCED-DR window: adds the three deferral classes with their participation
/// cap and penalties, and shifts load inside the balance rows.
pub fn build_sced_dr(problem: &DispatchProblem<'_>, window_start: usize) -> Result<DispatchModel, DispatchError> {
    if problem.mode != DispatchMode::ScedDr {
        return Err(DispatchError::WrongMode(problem.mode, DispatchMode::ScedDr));
    }
    build(problem, window_start)
}

fn build(problem: &DispatchProblem<'_>, window_start: usize) -> Result<DispatchModel, DispatchError> {
    let case = problem.case;
    let h = problem.horizon;
    if h == 0 {
        return Err(DispatchError::ZeroHorizon);
    }
    problem.dr_costs.check()?;
    let nb = case.buses.len();
    if problem.carry_in.inbound_mw.len() != nb {
        return Err(DispatchError::LedgerSize {
            have: problem.carry_in.inbound_mw.len(),
            need: nb,
        });
    }
    let have = problem.scenario.intervals();
    if window_start + h > have {
        return Err(GridError::ShortScenario {
            have,
            need: window_start + h,
        }
        .into());
    }
    let pos = case.bus_positions();
    let full = problem.scenario.aligned(case)?;
    let demand_nt: Vec<Vec<f64>> = full.iter().map(|row| row[window_start..window_start + h].to_vec()).collect();
    let carry_in_nt: Vec<Vec<f64>> = (0..nb)
        .map(|n| (0..h).map(|t| problem.carry_in.arrival(n, t + 1)).collect())
        .collect();
    let with_dr = problem.mode == DispatchMode::ScedDr;
    let costs = problem.dr_costs.as_array();
    let frac = problem.scenario.dr_fraction;

    let mut lp = LinearProgram::new(Sense::Minimize);
    let gens: Vec<_> = case.committed_generators().collect();
    let p: Vec<Vec<VarId>> = gens
        .iter()
        .map(|g| {
            (0..h)
                .map(|t| {
                    let v = lp.add_var(format!("p_g{}_t{}", g.id, t + 1), g.p_min_mw, g.p_max_mw);
                    lp.add_objective_term(v, g.cost_per_mwh);
                    v
                })
                .collect()
        })
        .collect();
    let theta: Vec<Vec<VarId>> = case
        .buses
        .iter()
        .map(|b| {
            (0..h)
                .map(|t| {
                    let name = format!("theta_b{}_t{}", b.id, t + 1);
                    if b.is_slack {
                        lp.add_var(name, 0.0, 0.0)
                    } else {
                        lp.add_free_var(name)
                    }
                })
                .collect()
        })
        .collect();
    let flow: Vec<Vec<VarId>> = case
        .lines
        .iter()
        .map(|l| {
            (0..h)
                .map(|t| lp.add_var(format!("flow_l{}_t{}", l.id, t + 1), -l.rating_mw, l.rating_mw))
                .collect()
        })
        .collect();
    let labels = ["dr15", "dr30", "dr45"];
    let dr: [Vec<Vec<Option<VarId>>>; 3] = std::array::from_fn(|c| {
        case.buses
            .iter()
            .enumerate()
            .map(|(n, b)| {
                (0..h)
                    .map(|t| {
                        let cap = frac * demand_nt[n][t];
                        (with_dr && cap > 0.0).then(|| {
                            let v = lp.add_var(format!("{}_b{}_t{}", labels[c], b.id, t + 1), 0.0, cap);
                            lp.add_objective_term(v, costs[c]);
                            v
                        })
                    })
                    .collect()
            })
            .collect()
    });

    for t in 0..h {
        for (k, l) in case.lines.iter().enumerate() {
            let b = l.susceptance_mw_per_rad;
            lp.add_constraint(
                format!("flowdef_l{}_t{}", l.id, t + 1),
                vec![(flow[k][t], 1.0), (theta[pos[&l.from_bus]][t], -b), (theta[pos[&l.to_bus]][t], b)],
                Relation::Eq,
                0.0,
            );
        }
        let mut rows: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); nb];
        for (gi, g) in gens.iter().enumerate() {
            rows[pos[&g.bus]].push((p[gi][t], 1.0));
        }
        for (k, l) in case.lines.iter().enumerate() {
            rows[pos[&l.to_bus]].push((flow[k][t], 1.0));
            rows[pos[&l.from_bus]].push((flow[k][t], -1.0));
        }
        for (n, row) in rows.iter_mut().enumerate() {
            for c in 0..3 {
                if let Some(v) = dr[c][n][t] {
                    row.push((v, 1.0));
                }
                if t >= DR_OFFSETS[c] {
                    if let Some(v) = dr[c][n][t - DR_OFFSETS[c]] {
                        row.push((v, -1.0));
                    }
                }
            }
        }
        for (n, row) in rows.into_iter().enumerate() {
            lp.add_constraint(
                format!("balance_b{}_t{}", case.buses[n].id, t + 1),
                row,
                Relation::Eq,
                demand_nt[n][t] + carry_in_nt[n][t],
            );
        }
        if with_dr {
            for n in 0..nb {
                let terms: Vec<(VarId, f64)> = (0..3).filter_map(|c| dr[c][n][t].map(|v| (v, 1.0))).collect();
                if terms.len() > 1 {
                    lp.add_constraint(
                        format!("drcap_b{}_t{}", case.buses[n].id, t + 1),
                        terms,
                        Relation::Le,
                        frac * demand_nt[n][t],
                    );
                }
            }
        }
    }

    Ok(DispatchModel {
        lp,
        index: VarIndex {
            gen_ids: gens.iter().map(|g| g.id).collect(),
            p,
            theta,
            flow,
            dr,
        },
        mode: problem.mode,
        window_start,
        horizon: h,
        demand_nt,
        carry_in_nt,
        dr_costs: costs,
        dr_fraction: frac,
    })
}

impl DispatchModel {
    /// Reads a solver result back into matrices.
    pub fn extract(&self, values: &[f64], objective: f64, pivots: usize, case: &crate::grid_model::GridCase) -> DispatchSolution {
        let h = self.horizon;
        let read = |m: &[Vec<VarId>]| -> Vec<Vec<f64>> { m.iter().map(|row| row.iter().map(|v| values[v.0]).collect()).collect() };
        let read_dr = |c: usize| -> Vec<Vec<f64>> {
            self.index.dr[c]
                .iter()
                .map(|row| row.iter().map(|v| v.map_or(0.0, |v| values[v.0].max(0.0))).collect())
                .collect()
        };
        let p_gt = read(&self.index.p);
        let dr = [read_dr(0), read_dr(1), read_dr(2)];
        let nb = self.demand_nt.len();
        let mut net = vec![vec![0.0; h]; nb];
        for n in 0..nb {
            for t in 0..h {
                let mut v = self.demand_nt[n][t] + self.carry_in_nt[n][t];
                for c in 0..3 {
                    v -= dr[c][n][t];
                    if t >= DR_OFFSETS[c] {
                        v += dr[c][n][t - DR_OFFSETS[c]];
                    }
                }
                net[n][t] = v;
            }
        }
        let gens: Vec<_> = case.committed_generators().collect();
        let interval_cost_usd = (0..h)
            .map(|t| {
                let gen: f64 = gens.iter().enumerate().map(|(gi, g)| g.cost_per_mwh * p_gt[gi][t]).sum();
                let shift: f64 = (0..3).map(|c| self.dr_costs[c] * dr[c].iter().map(|row| row[t]).sum::<f64>()).sum();
                gen + shift
            })
            .collect();
        let dr_total_first = (0..nb).map(|n| dr[0][n][0] + dr[1][n][0] + dr[2][n][0]).collect();
        let [dr15, dr30, dr45] = dr;
        DispatchSolution {
            mode: self.mode,
            window_start: self.window_start,
            horizon: h,
            gen_ids: self.index.gen_ids.clone(),
            p_gt,
            theta_nt: read(&self.index.theta),
            flow_kt: read(&self.index.flow),
            dr15,
            dr30,
            dr45,
            dr_total_first,
            dr_max_first: self.demand_nt.iter().map(|d| self.dr_fraction * d[0]).collect(),
            demand_nt: self.demand_nt.clone(),
            carry_in_nt: self.carry_in_nt.clone(),
            net_demand_nt: net,
            objective_usd: objective,
            interval_cost_usd,
            pivots,
        }
    }
}

/// Builds the window model for the problem's mode and solves it.
pub fn solve_window(problem: &DispatchProblem<'_>, window_start: usize) -> Result<DispatchSolution, DispatchError> {
    let model = match problem.mode {
        DispatchMode::Sced => build_sced(problem, window_start)?,
        DispatchMode::ScedDr => build_sced_dr(problem, window_start)?,
    };
    let sol = lp::solve(&model.lp)?;
    let window = window_start + 1;
    match sol.status {
        LpStatus::Optimal => Ok(model.extract(&sol.values, sol.objective_value, sol.pivots, problem.case)),
        LpStatus::Unbounded => Err(DispatchError::Unbounded { window }),
        LpStatus::Infeasible => Err(DispatchError::Infeasible {
            window,
            diagnostic: infeasibility_diagnostic(&model, problem),
        }),
    }
}

fn infeasibility_diagnostic(model: &DispatchModel, problem: &DispatchProblem<'_>) -> String {
    let cap = problem.case.committed_capacity_mw();
    let pmin: f64 = problem.case.committed_generators().map(|g| g.p_min_mw).sum();
    for t in 0..model.horizon {
        let d: f64 = model.demand_nt.iter().zip(&model.carry_in_nt).map(|(d, a)| d[t] + a[t]).sum();
        let interval = model.window_start + t + 1;
        if d > cap + 1e-9 {
            return format!("load shed impossible: interval {interval} demand {d:.3} MW exceeds committed capacity {cap:.3} MW");
        }
        if d < pmin - 1e-9 && problem.mode == DispatchMode::Sced {
            return format!("interval {interval} demand {d:.3} MW is below total minimum generation {pmin:.3} MW");
        }
    }
    "network limits and generator bounds admit no balanced dispatch".to_string()
}
