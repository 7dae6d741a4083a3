//! Static network data, demand scenarios, case-file I/O and DC flow
//! evaluation.

mod flow;
mod parse;
pub mod shipped;
mod validate;

pub use flow::{compute_dc_flows, nodal_injections};
pub use parse::{parse_case, parse_scenario, serialize_case};
pub use validate::{validate, validate_with_scenario, ValidationReport, Violation};

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum GridError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: duplicate {section} id {id}")]
    DuplicateId { section: &'static str, id: usize, line: usize },
    #[error("line {line}: unknown section {name}")]
    UnknownSection { name: String, line: usize },
    #[error("missing required section {0}")]
    MissingSection(&'static str),
    #[error("{context} references unknown bus {bus}")]
    DanglingBus { context: String, bus: usize },
    #[error("line {line}: unknown parameter {key}")]
    UnknownParameter { key: String, line: usize },
    #[error("no angle given for bus {bus}")]
    MissingAngle { bus: usize },
    #[error("unknown line {0}")]
    UnknownLine(usize),
    #[error("scenario has {have} intervals, {need} required")]
    ShortScenario { have: usize, need: usize },
}

impl GridError {
    pub fn code(&self) -> &'static str {
        match self {
            GridError::Syntax { .. } => "grid_model::syntax",
            GridError::DuplicateId { .. } => "grid_model::duplicate_id",
            GridError::UnknownSection { .. } => "grid_model::unknown_section",
            GridError::MissingSection(_) => "grid_model::missing_section",
            GridError::DanglingBus { .. } => "grid_model::dangling_bus",
            GridError::UnknownParameter { .. } => "grid_model::unknown_parameter",
            GridError::MissingAngle { .. } => "grid_model::missing_angle",
            GridError::UnknownLine(_) => "grid_model::unknown_line",
            GridError::ShortScenario { .. } => "grid_model::short_scenario",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: usize,
    pub is_slack: bool,
}

/// A transmission line. Flow is positive from `from_bus` to `to_bus`.
#[derive(Debug, Clone, PartialEq)]
pub struct Line {
    pub id: usize,
    pub from_bus: usize,
    pub to_bus: usize,
    pub susceptance_mw_per_rad: f64,
    pub rating_mw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub id: usize,
    pub bus: usize,
    pub p_min_mw: f64,
    pub p_max_mw: f64,
    pub cost_per_mwh: f64,
    /// Only committed units take part in dispatch.
    pub committed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridCase {
    pub name: String,
    pub buses: Vec<Bus>,
    pub lines: Vec<Line>,
    pub generators: Vec<Generator>,
}

impl GridCase {
    /// Map from bus id to its position in `buses`.
    pub fn bus_positions(&self) -> HashMap<usize, usize> {
        self.buses.iter().enumerate().map(|(i, b)| (b.id, i)).collect()
    }

    pub fn bus_position(&self, id: usize) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn line_position(&self, id: usize) -> Option<usize> {
        self.lines.iter().position(|l| l.id == id)
    }

    pub fn line(&self, id: usize) -> Result<&Line, GridError> {
        self.lines
            .iter()
            .find(|l| l.id == id)
            .ok_or(GridError::UnknownLine(id))
    }

    pub fn slack_position(&self) -> Option<usize> {
        self.buses.iter().position(|b| b.is_slack)
    }

    pub fn committed_generators(&self) -> impl Iterator<Item = &Generator> {
        self.generators.iter().filter(|g| g.committed)
    }

    pub fn committed_capacity_mw(&self) -> f64 {
        self.committed_generators().map(|g| g.p_max_mw).sum()
    }
}

/// Named demand level of a scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DemandLevel {
    Low,
    Medium,
    High,
    Custom,
}

impl DemandLevel {
    pub const SHIPPED: [DemandLevel; 3] = [DemandLevel::Low, DemandLevel::Medium, DemandLevel::High];

    pub fn as_str(self) -> &'static str {
        match self {
            DemandLevel::Low => "low",
            DemandLevel::Medium => "medium",
            DemandLevel::High => "high",
            DemandLevel::Custom => "custom",
        }
    }
}

impl fmt::Display for DemandLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DemandLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(DemandLevel::Low),
            "medium" => Ok(DemandLevel::Medium),
            "high" => Ok(DemandLevel::High),
            "custom" => Ok(DemandLevel::Custom),
            other => Err(format!("unknown scenario label {other}")),
        }
    }
}

pub const DEFAULT_DR_FRACTION: f64 = 0.30;
pub const DEFAULT_INTERVAL_MINUTES: f64 = 15.0;

/// Forecast nodal demand over a sequence of intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandScenario {
    /// Bus id -> MW per interval. Buses without an entry have zero demand.
    pub demand_mw: BTreeMap<usize, Vec<f64>>,
    /// Share of each interval's nodal load that may participate in DR.
    pub dr_fraction: f64,
    pub interval_minutes: f64,
    pub label: DemandLevel,
}

impl DemandScenario {
    pub fn new(demand_mw: BTreeMap<usize, Vec<f64>>, label: DemandLevel) -> Self {
        Self {
            demand_mw,
            dr_fraction: DEFAULT_DR_FRACTION,
            interval_minutes: DEFAULT_INTERVAL_MINUTES,
            label,
        }
    }

    pub fn intervals(&self) -> usize {
        self.demand_mw.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn demand(&self, bus: usize, t: usize) -> f64 {
        self.demand_mw
            .get(&bus)
            .and_then(|v| v.get(t))
            .copied()
            .unwrap_or(0.0)
    }

    /// System demand per interval.
    pub fn system_totals(&self) -> Vec<f64> {
        (0..self.intervals())
            .map(|t| self.demand_mw.values().map(|v| v[t]).sum())
            .collect()
    }

    pub fn peak_mw(&self) -> f64 {
        self.system_totals().into_iter().fold(0.0, f64::max)
    }

    /// Demand matrix aligned with `case.buses` (position x interval).
    pub fn aligned(&self, case: &GridCase) -> Result<Vec<Vec<f64>>, GridError> {
        let pos = case.bus_positions();
        let t = self.intervals();
        let mut out = vec![vec![0.0; t]; case.buses.len()];
        for (&bus, series) in &self.demand_mw {
            let &p = pos.get(&bus).ok_or_else(|| GridError::DanglingBus {
                context: "LOAD".to_string(),
                bus,
            })?;
            out[p] = series.clone();
        }
        Ok(out)
    }
}

/// Everything a case file can carry.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseFile {
    pub grid: GridCase,
    pub scenario: Option<DemandScenario>,
    /// DR penalties (15, 30, 45 minute) in $/MW when set by PARAMS.
    pub dr_costs: Option<[f64; 3]>,
}
