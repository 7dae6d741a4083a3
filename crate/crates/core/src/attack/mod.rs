//! False DR-signal and load-measurement injection against a fixed SCED-DR
//! first interval.
//!
//! The attacker rewrites the DR signals sent to loads. Generation stays at
//! its scheduled set points, so the network settles to new angles and flows.
//! Fake load measurements `d - DR~` hide the change from the operator. The
//! attack LP picks the false signals that push the target line's flow as far
//! as possible in its current direction, within a budget on the total DR
//! deviation and on the total angle deviation.

mod csv_out;
mod direct;

pub use csv_out::{attack_csv, ATTACK_CSV_HEADER};
pub use direct::{build_fsmi_direct, DIRECT_MAX_BUSES};

use crate::dispatch::{DispatchMode, DispatchSolution};
use crate::grid_model::{compute_dc_flows, GridCase};
use crate::lp::{self, LinearProgram, LpError, LpStatus, Relation, Sense, VarId};
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_ALPHA: f64 = 0.3;
pub const DEFAULT_Q0_MW: f64 = 100.0;
pub const DEFAULT_S0_RAD: f64 = 10.0;
/// Flows smaller than this have no usable sign.
pub const ZERO_FLOW_MW: f64 = 1e-9;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("unknown line {0}")]
    UnknownLine(usize),
    #[error("line {0} carries no pre-attack flow, so the attack direction is undefined")]
    ZeroFlow(usize),
    #[error("alpha {0} outside [0, 1]")]
    Alpha(f64),
    #[error("budget {name} = {value} must be finite and nonnegative")]
    Budget { name: &'static str, value: f64 },
    #[error("attack needs a SCED-DR dispatch, got {0}")]
    NotScedDr(DispatchMode),
    #[error("input covers {have} buses, case has {need}")]
    InputSize { have: usize, need: usize },
    #[error("attack LP is {0}, although the scheduled point is feasible")]
    Unexpected(LpStatus),
    #[error("direct model enumerates sign patterns and is limited to small cases, got {0} buses")]
    DirectTooLarge(usize),
    #[error(transparent)]
    Lp(#[from] LpError),
}

impl AttackError {
    pub fn code(&self) -> &'static str {
        match self {
            AttackError::UnknownLine(_) => "attack::unknown_line",
            AttackError::ZeroFlow(_) => "attack::zero_flow",
            AttackError::Alpha(_) => "attack::alpha",
            AttackError::Budget { .. } => "attack::budget",
            AttackError::NotScedDr(_) => "attack::mode",
            AttackError::InputSize { .. } => "attack::input",
            AttackError::Unexpected(_) => "attack::unexpected_status",
            AttackError::DirectTooLarge(_) => "attack::direct_size",
            AttackError::Lp(e) => e.code(),
        }
    }
}

/// Which DR channels the attacker controls.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelMode {
    /// Only loads already scheduled for DR, within `(1 ± α)` of the schedule.
    Limited,
    /// Any participating load, from 0 up to its DR cap.
    Unlimited,
}

impl ChannelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelMode::Limited => "limited",
            ChannelMode::Unlimited => "unlimited",
        }
    }
}

impl fmt::Display for ChannelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "limited" => Ok(ChannelMode::Limited),
            "unlimited" => Ok(ChannelMode::Unlimited),
            other => Err(format!("unknown channel mode {other}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub target_line: usize,
    pub alpha: f64,
    /// l1 budget on angle deviations, radians.
    pub s0: f64,
    /// l1 budget on DR-signal deviations, MW.
    pub q0: f64,
    pub mode: ChannelMode,
}

impl AttackSpec {
    pub fn new(target_line: usize, mode: ChannelMode) -> Self {
        Self {
            target_line,
            alpha: DEFAULT_ALPHA,
            s0: DEFAULT_S0_RAD,
            q0: DEFAULT_Q0_MW,
            mode,
        }
    }

    pub fn check(&self, case: &GridCase) -> Result<(), AttackError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(AttackError::Alpha(self.alpha));
        }
        for (name, value) in [("s0", self.s0), ("q0", self.q0)] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(AttackError::Budget { name, value });
            }
        }
        if case.line_position(self.target_line).is_none() {
            return Err(AttackError::UnknownLine(self.target_line));
        }
        Ok(())
    }
}

/// The fixed first-interval quantities the attacker works against, by bus
/// position (angles, DR, demand) and committed-generator order.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackInput {
    pub fixed_generation: Vec<f64>,
    pub fixed_angles: Vec<f64>,
    pub scheduled_dr15: Vec<f64>,
    pub scheduled_dr30: Vec<f64>,
    pub scheduled_dr45: Vec<f64>,
    /// Load seen by the first-interval balance: forecast plus arrivals of
    /// earlier shifts.
    pub demand_first: Vec<f64>,
    pub dr_max: Vec<f64>,
}

impl AttackInput {
    pub fn from_dispatch(sol: &DispatchSolution) -> Result<Self, AttackError> {
        if sol.mode != DispatchMode::ScedDr {
            return Err(AttackError::NotScedDr(sol.mode));
        }
        let col = |m: &[Vec<f64>]| DispatchSolution::column(m, 0);
        Ok(Self {
            fixed_generation: col(&sol.p_gt),
            fixed_angles: col(&sol.theta_nt),
            scheduled_dr15: col(&sol.dr15),
            scheduled_dr30: col(&sol.dr30),
            scheduled_dr45: col(&sol.dr45),
            demand_first: sol
                .demand_nt
                .iter()
                .zip(&sol.carry_in_nt)
                .map(|(d, a)| d[0] + a[0])
                .collect(),
            dr_max: sol.dr_max_first.clone(),
        })
    }

    /// Total scheduled first-interval DR per bus.
    pub fn scheduled_dr(&self) -> Vec<f64> {
        (0..self.fixed_angles.len())
            .map(|n| self.scheduled_dr15[n] + self.scheduled_dr30[n] + self.scheduled_dr45[n])
            .collect()
    }

    /// Bounds on the false DR signal per bus.
    pub fn false_dr_bounds(&self, spec: &AttackSpec) -> Vec<(f64, f64)> {
        self.scheduled_dr()
            .iter()
            .enumerate()
            .map(|(n, &dr)| {
                let d = self.demand_first[n].max(0.0);
                let (lo, hi) = match spec.mode {
                    ChannelMode::Limited => ((1.0 - spec.alpha) * dr, (1.0 + spec.alpha) * dr),
                    ChannelMode::Unlimited => (0.0, self.dr_max[n]),
                };
                let hi = hi.min(d);
                (lo.min(hi), hi)
            })
            .collect()
    }

    /// Scheduled flows implied by the fixed angles.
    pub fn scheduled_flows(&self, case: &GridCase) -> Vec<f64> {
        compute_dc_flows(case, &self.fixed_angles).expect("angles cover every bus")
    }

    fn check(&self, case: &GridCase) -> Result<(), AttackError> {
        let need = case.buses.len();
        for have in [
            self.fixed_angles.len(),
            self.scheduled_dr15.len(),
            self.scheduled_dr30.len(),
            self.scheduled_dr45.len(),
            self.demand_first.len(),
            self.dr_max.len(),
        ] {
            if have != need {
                return Err(AttackError::InputSize { have, need });
            }
        }
        let gens = case.committed_generators().count();
        if self.fixed_generation.len() != gens {
            return Err(AttackError::InputSize {
                have: self.fixed_generation.len(),
                need: gens,
            });
        }
        Ok(())
    }
}

/// Variable handles of a built attack LP, by bus or line position.
#[derive(Debug, Clone, PartialEq)]
pub struct AttackIndex {
    pub theta: Vec<VarId>,
    pub flow: Vec<VarId>,
    pub false_dr: Vec<VarId>,
    pub angle_dev: Vec<VarId>,
    pub dr_dev: Vec<VarId>,
    pub s: Vec<VarId>,
    pub q: Vec<VarId>,
}

#[derive(Debug, Clone)]
pub struct AttackModel {
    pub lp: LinearProgram,
    pub index: AttackIndex,
    /// Sign of the pre-attack target flow.
    pub sign: f64,
    pub target_position: usize,
}

fn target_sign(input: &AttackInput, spec: &AttackSpec, case: &GridCase) -> Result<(usize, f64), AttackError> {
    let k = case
        .line_position(spec.target_line)
        .ok_or(AttackError::UnknownLine(spec.target_line))?;
    let pre = input.scheduled_flows(case)[k];
    if pre.abs() < ZERO_FLOW_MW {
        return Err(AttackError::ZeroFlow(spec.target_line));
    }
    Ok((k, pre.signum()))
}

/// Attack LP with the l1 budgets linearized through auxiliaries
/// `s_n >= |c_n|` and `q_n >= |ΔDR_n|`.
pub fn build_fsmi(input: &AttackInput, spec: &AttackSpec, case: &GridCase) -> Result<AttackModel, AttackError> {
    spec.check(case)?;
    input.check(case)?;
    let (target_position, sign) = target_sign(input, spec, case)?;
    let pos = case.bus_positions();
    let dr = input.scheduled_dr();
    let bounds = input.false_dr_bounds(spec);
    let mut lp = LinearProgram::new(Sense::Maximize);

    // The reference angle is left free: only angle differences matter to
    // flows, and the budget on c already limits how far angles may move.
    let theta: Vec<VarId> = case.buses.iter().map(|b| lp.add_free_var(format!("theta_b{}", b.id))).collect();
    let flow: Vec<VarId> = case.lines.iter().map(|l| lp.add_free_var(format!("flow_l{}", l.id))).collect();
    let false_dr: Vec<VarId> = case
        .buses
        .iter()
        .zip(&bounds)
        .map(|(b, &(lo, hi))| lp.add_var(format!("fdr_b{}", b.id), lo, hi))
        .collect();
    let angle_dev: Vec<VarId> = case.buses.iter().map(|b| lp.add_free_var(format!("c_b{}", b.id))).collect();
    let dr_dev: Vec<VarId> = case.buses.iter().map(|b| lp.add_free_var(format!("ddr_b{}", b.id))).collect();
    let s: Vec<VarId> = case.buses.iter().map(|b| lp.add_var(format!("s_b{}", b.id), 0.0, f64::INFINITY)).collect();
    let q: Vec<VarId> = case.buses.iter().map(|b| lp.add_var(format!("q_b{}", b.id), 0.0, f64::INFINITY)).collect();

    lp.add_objective_term(flow[target_position], sign);

    for (k, l) in case.lines.iter().enumerate() {
        let b = l.susceptance_mw_per_rad;
        lp.add_constraint(
            format!("flowdef_l{}", l.id),
            vec![(flow[k], 1.0), (theta[pos[&l.from_bus]], -b), (theta[pos[&l.to_bus]], b)],
            Relation::Eq,
            0.0,
        );
    }
    let mut gen_at = vec![0.0; case.buses.len()];
    for (g, &p) in case.committed_generators().zip(&input.fixed_generation) {
        gen_at[pos[&g.bus]] += p;
    }
    let mut rows: Vec<Vec<(VarId, f64)>> = vec![Vec::new(); case.buses.len()];
    for (k, l) in case.lines.iter().enumerate() {
        rows[pos[&l.to_bus]].push((flow[k], 1.0));
        rows[pos[&l.from_bus]].push((flow[k], -1.0));
    }
    for (n, mut row) in rows.into_iter().enumerate() {
        let id = case.buses[n].id;
        // Σ P* + inflow − outflow = d − DR~  ⇔  inflow − outflow + DR~ = d − Σ P*
        row.push((false_dr[n], 1.0));
        lp.add_constraint(format!("balance_b{id}"), row, Relation::Eq, input.demand_first[n] - gen_at[n]);
        lp.add_constraint(
            format!("angledev_b{id}"),
            vec![(angle_dev[n], 1.0), (theta[n], 1.0)],
            Relation::Eq,
            input.fixed_angles[n],
        );
        lp.add_constraint(
            format!("drdev_b{id}"),
            vec![(dr_dev[n], 1.0), (false_dr[n], 1.0)],
            Relation::Eq,
            dr[n],
        );
        lp.add_constraint(format!("s_pos_b{id}"), vec![(s[n], 1.0), (angle_dev[n], -1.0)], Relation::Ge, 0.0);
        lp.add_constraint(format!("s_neg_b{id}"), vec![(s[n], 1.0), (angle_dev[n], 1.0)], Relation::Ge, 0.0);
        lp.add_constraint(format!("q_pos_b{id}"), vec![(q[n], 1.0), (dr_dev[n], -1.0)], Relation::Ge, 0.0);
        lp.add_constraint(format!("q_neg_b{id}"), vec![(q[n], 1.0), (dr_dev[n], 1.0)], Relation::Ge, 0.0);
    }
    lp.add_constraint("angle_budget", s.iter().map(|&v| (v, 1.0)).collect(), Relation::Le, spec.s0);
    lp.add_constraint("dr_budget", q.iter().map(|&v| (v, 1.0)).collect(), Relation::Le, spec.q0);

    Ok(AttackModel {
        lp,
        index: AttackIndex {
            theta,
            flow,
            false_dr,
            angle_dev,
            dr_dev,
            s,
            q,
        },
        sign,
        target_position,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AttackResult {
    pub spec: AttackSpec,
    pub scheduled_dr: Vec<f64>,
    pub false_dr: Vec<f64>,
    pub attacked_flows: Vec<f64>,
    pub attacked_angles: Vec<f64>,
    pub dr_deviation: Vec<f64>,
    pub angle_deviation: Vec<f64>,
    /// Measurements the attacker must fake to hide the change: d − DR~.
    pub false_load_mw: Vec<f64>,
    pub pre_attack_flows: Vec<f64>,
    pub pre_attack_angles: Vec<f64>,
    pub pre_attack_flow_mw: f64,
    pub objective_flow_mw: f64,
    pub overload_mw: f64,
    pub rating_mw: f64,
    pub loading_rate_pre: f64,
    pub loading_rate_post: f64,
    pub angle_budget_used: f64,
    pub dr_budget_used: f64,
    pub pivots: usize,
}

impl AttackResult {
    pub fn target_position(&self, case: &GridCase) -> usize {
        case.line_position(self.spec.target_line).expect("checked at build")
    }
}

/// Solves the attack LP against given fixed inputs.
pub fn attack_input(input: &AttackInput, spec: &AttackSpec, case: &GridCase) -> Result<AttackResult, AttackError> {
    let model = build_fsmi(input, spec, case)?;
    let sol = lp::solve(&model.lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(AttackError::Unexpected(sol.status));
    }
    let ix = &model.index;
    let read = |v: &[VarId]| -> Vec<f64> { v.iter().map(|&id| sol.value(id)).collect() };
    let attacked_flows = read(&ix.flow);
    let false_dr = read(&ix.false_dr);
    let dr_deviation = read(&ix.dr_dev);
    let angle_deviation = read(&ix.angle_dev);
    let k = model.target_position;
    let rating = case.lines[k].rating_mw;
    let pre_attack_flows = input.scheduled_flows(case);
    let post = attacked_flows[k];
    Ok(AttackResult {
        spec: *spec,
        scheduled_dr: input.scheduled_dr(),
        false_load_mw: input.demand_first.iter().zip(&false_dr).map(|(d, f)| d - f).collect(),
        false_dr,
        attacked_angles: read(&ix.theta),
        angle_budget_used: angle_deviation.iter().map(|c| c.abs()).sum(),
        dr_budget_used: dr_deviation.iter().map(|c| c.abs()).sum(),
        dr_deviation,
        angle_deviation,
        pre_attack_flow_mw: pre_attack_flows[k],
        objective_flow_mw: model.sign * post,
        overload_mw: (post.abs() - rating).max(0.0),
        rating_mw: rating,
        loading_rate_pre: pre_attack_flows[k].abs() / rating,
        loading_rate_post: post.abs() / rating,
        pre_attack_flows,
        pre_attack_angles: input.fixed_angles.clone(),
        attacked_flows,
        pivots: sol.pivots,
    })
}

/// Attacks the first interval of a solved SCED-DR window.
pub fn run_attack(dispatch: &DispatchSolution, spec: &AttackSpec, case: &GridCase) -> Result<AttackResult, AttackError> {
    spec.check(case)?;
    attack_input(&AttackInput::from_dispatch(dispatch)?, spec, case)
}
