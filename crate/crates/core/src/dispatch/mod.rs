//! SCED and SCED-DR dispatch over a look-ahead window, and the rolling
//! protocol that implements only the first interval of each window.
//!
//! Demand response moves non-critical load out of interval `t` and brings it
//! back 1, 2 or 3 intervals later (the 15, 30 and 45 minute classes). Shifts
//! implemented in earlier windows whose arrival falls inside the current
//! window are supplied by a [`CarryOverLedger`].

mod csv_out;
mod model;
mod roll;

pub use csv_out::{dispatch_csv, DISPATCH_CSV_HEADER};
pub(crate) use csv_out::num;
pub use model::{build_sced, build_sced_dr, solve_window, DispatchModel, VarIndex};
pub use roll::{extract_net_demand, roll, ImplementedInterval, RollResult};

use crate::grid_model::{DemandScenario, GridCase, GridError};
use crate::lp::LpError;
use std::fmt;
use std::str::FromStr;

pub const DEFAULT_HORIZON: usize = 4;
/// Deferral lengths, in intervals, of the three DR classes.
pub const DR_OFFSETS: [usize; 3] = [1, 2, 3];

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DispatchError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("window {window} is infeasible: {diagnostic}")]
    Infeasible { window: usize, diagnostic: String },
    #[error("window {window} is unbounded")]
    Unbounded { window: usize },
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("DR costs must satisfy 0 <= c15 <= c30 <= c45, got ({0}, {1}, {2})")]
    DrCosts(f64, f64, f64),
    #[error("{0} mode problem passed to the {1} builder")]
    WrongMode(DispatchMode, DispatchMode),
    #[error("ledger covers {have} buses, case has {need}")]
    LedgerSize { have: usize, need: usize },
}

impl DispatchError {
    pub fn code(&self) -> &'static str {
        match self {
            DispatchError::Grid(e) => e.code(),
            DispatchError::Lp(e) => e.code(),
            DispatchError::Infeasible { .. } => "dispatch::infeasible",
            DispatchError::Unbounded { .. } => "dispatch::unbounded",
            DispatchError::ZeroHorizon => "dispatch::horizon",
            DispatchError::DrCosts(..) => "dispatch::dr_costs",
            DispatchError::WrongMode(..) => "dispatch::mode",
            DispatchError::LedgerSize { .. } => "dispatch::ledger",
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, DispatchError::Infeasible { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DispatchMode {
    Sced,
    ScedDr,
}

impl DispatchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            DispatchMode::Sced => "sced",
            DispatchMode::ScedDr => "sced-dr",
        }
    }
}

impl fmt::Display for DispatchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DispatchMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sced" => Ok(DispatchMode::Sced),
            "sced-dr" | "sced_dr" => Ok(DispatchMode::ScedDr),
            other => Err(format!("unknown dispatch mode {other}")),
        }
    }
}

/// Penalties in $/MW for deferring load by 15, 30 and 45 minutes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrCostConfig {
    pub cost_15: f64,
    pub cost_30: f64,
    pub cost_45: f64,
}

impl Default for DrCostConfig {
    fn default() -> Self {
        Self {
            cost_15: 1.0,
            cost_30: 2.0,
            cost_45: 3.0,
        }
    }
}

impl DrCostConfig {
    pub fn new(cost_15: f64, cost_30: f64, cost_45: f64) -> Result<Self, DispatchError> {
        let c = Self {
            cost_15,
            cost_30,
            cost_45,
        };
        c.check()?;
        Ok(c)
    }

    pub fn from_array([a, b, c]: [f64; 3]) -> Result<Self, DispatchError> {
        Self::new(a, b, c)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.cost_15, self.cost_30, self.cost_45]
    }

    pub fn check(&self) -> Result<(), DispatchError> {
        let ok = self.cost_15 >= 0.0 && self.cost_15 <= self.cost_30 && self.cost_30 <= self.cost_45 && self.cost_45.is_finite();
        if ok {
            Ok(())
        } else {
            Err(DispatchError::DrCosts(self.cost_15, self.cost_30, self.cost_45))
        }
    }
}

/// Load already deferred by implemented intervals, by bus position and by
/// arrival offset (1, 2 or 3 intervals after the last implemented one).
#[derive(Debug, Clone, PartialEq)]
pub struct CarryOverLedger {
    pub inbound_mw: Vec<[f64; 3]>,
}

impl CarryOverLedger {
    pub fn empty(buses: usize) -> Self {
        Self {
            inbound_mw: vec![[0.0; 3]; buses],
        }
    }

    /// MW arriving at bus position `bus`, `offset` intervals ahead.
    pub fn arrival(&self, bus: usize, offset: usize) -> f64 {
        match offset {
            1..=3 => self.inbound_mw[bus][offset - 1],
            _ => 0.0,
        }
    }

    pub fn total_mw(&self) -> f64 {
        self.inbound_mw.iter().flatten().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.inbound_mw.iter().flatten().all(|&v| v == 0.0)
    }

    /// Ledger after one more interval is implemented with the given
    /// outbound shifts per bus.
    pub fn advance(&self, dr15: &[f64], dr30: &[f64], dr45: &[f64]) -> Self {
        let inbound_mw = self
            .inbound_mw
            .iter()
            .enumerate()
            .map(|(n, old)| [old[1] + dr15[n], old[2] + dr30[n], dr45[n]])
            .collect();
        Self { inbound_mw }
    }
}

/// One dispatch problem: a case, a scenario, and the rolling state.
#[derive(Debug, Clone)]
pub struct DispatchProblem<'a> {
    pub case: &'a GridCase,
    pub scenario: &'a DemandScenario,
    pub horizon: usize,
    pub mode: DispatchMode,
    pub dr_costs: DrCostConfig,
    pub carry_in: CarryOverLedger,
}

impl<'a> DispatchProblem<'a> {
    pub fn new(case: &'a GridCase, scenario: &'a DemandScenario, mode: DispatchMode) -> Self {
        Self {
            case,
            scenario,
            horizon: DEFAULT_HORIZON,
            mode,
            dr_costs: DrCostConfig::default(),
            carry_in: CarryOverLedger::empty(case.buses.len()),
        }
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_dr_costs(mut self, dr_costs: DrCostConfig) -> Self {
        self.dr_costs = dr_costs;
        self
    }

    /// Number of windows the scenario supports with this horizon.
    pub fn max_windows(&self) -> usize {
        (self.scenario.intervals() + 1).saturating_sub(self.horizon)
    }
}

/// Solved dispatch window. Matrices are indexed `[entity position][interval
/// within window]`; entity positions follow `case.buses`, `case.lines` and
/// the committed generators in case order.
#[derive(Debug, Clone, PartialEq)]
pub struct DispatchSolution {
    pub mode: DispatchMode,
    pub window_start: usize,
    pub horizon: usize,
    pub gen_ids: Vec<usize>,
    pub p_gt: Vec<Vec<f64>>,
    pub theta_nt: Vec<Vec<f64>>,
    pub flow_kt: Vec<Vec<f64>>,
    pub dr15: Vec<Vec<f64>>,
    pub dr30: Vec<Vec<f64>>,
    pub dr45: Vec<Vec<f64>>,
    /// Scheduled first-interval DR per bus, summed over the three classes.
    pub dr_total_first: Vec<f64>,
    /// First-interval participation cap per bus (dr_fraction x d_{n,1}).
    pub dr_max_first: Vec<f64>,
    /// Forecast demand d_{n,t}.
    pub demand_nt: Vec<Vec<f64>>,
    /// Arrivals from the carry-over ledger.
    pub carry_in_nt: Vec<Vec<f64>>,
    /// Demand actually served: forecast minus shifts out plus shifts in.
    pub net_demand_nt: Vec<Vec<f64>>,
    pub objective_usd: f64,
    /// Generation plus DR cost per interval; sums to `objective_usd`.
    pub interval_cost_usd: Vec<f64>,
    pub pivots: usize,
}

impl DispatchSolution {
    /// Largest nodal balance residual (MW) over all buses and intervals.
    pub fn max_balance_residual(&self, case: &GridCase) -> f64 {
        let pos = case.bus_positions();
        let mut worst = 0.0f64;
        for t in 0..self.horizon {
            let mut inj = vec![0.0; case.buses.len()];
            for (gi, &gid) in self.gen_ids.iter().enumerate() {
                let g = case.generators.iter().find(|g| g.id == gid).unwrap();
                inj[pos[&g.bus]] += self.p_gt[gi][t];
            }
            for (k, l) in case.lines.iter().enumerate() {
                inj[pos[&l.from_bus]] -= self.flow_kt[k][t];
                inj[pos[&l.to_bus]] += self.flow_kt[k][t];
            }
            for (n, v) in inj.iter().enumerate() {
                worst = worst.max((v - self.net_demand_nt[n][t]).abs());
            }
        }
        worst
    }

    pub fn total_dr_first(&self) -> f64 {
        self.dr_total_first.iter().sum()
    }

    pub fn angles_at(&self, t: usize) -> Vec<f64> {
        self.theta_nt.iter().map(|row| row[t]).collect()
    }

    pub fn flows_at(&self, t: usize) -> Vec<f64> {
        self.flow_kt.iter().map(|row| row[t]).collect()
    }

    pub fn column(m: &[Vec<f64>], t: usize) -> Vec<f64> {
        m.iter().map(|row| row[t]).collect()
    }
}
