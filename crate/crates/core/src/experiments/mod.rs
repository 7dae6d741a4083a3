//! Scripted studies: SCED vs SCED-DR benefits per scenario, the pre-attack
//! loading profile, α and Q0 attack sweeps, and the demand-level attack
//! comparison. Every table is plot-ready CSV; sweep points run in parallel
//! but rows always come out in grid order.
//!
//! CSV schemas:
//!
//! | study          | columns                                                              |
//! |----------------|----------------------------------------------------------------------|
//! | `benefit`      | see [`crate::metrics::SUMMARY_CSV_HEADER`]                            |
//! | `loading`      | see [`crate::metrics::LOADING_CSV_HEADER`]                            |
//! | `alpha_sweep`  | see [`SWEEP_CSV_HEADER`], `value` is α                                 |
//! | `q0_sweep`     | see [`SWEEP_CSV_HEADER`], `value` is Q0 in MW                           |
//! | `demand_level` | see [`DEMAND_LEVEL_CSV_HEADER`]                                        |

mod plot;

pub use plot::gnuplot_script;

use crate::attack::{run_attack, AttackError, AttackSpec, ChannelMode};
use crate::dispatch::{roll, solve_window, DispatchError, DispatchMode, DispatchProblem, DispatchSolution, DrCostConfig, DEFAULT_HORIZON};
use crate::grid_model::{DemandScenario, GridCase};
use crate::metrics::{line_loadings, LineLoading, MetricsError, MetricsReport};
use rayon::prelude::*;
use std::fmt;

pub const DEFAULT_WINDOWS: usize = 4;
/// Loading-rate slack allowed before a sweep counts as non-monotone.
pub const MONOTONE_TOL: f64 = 1e-7;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("scenario {scenario}: {source}")]
    Dispatch { scenario: String, source: DispatchError },
    #[error(transparent)]
    Attack(#[from] AttackError),
    #[error("scenario {scenario}: {source}")]
    Metrics { scenario: String, source: MetricsError },
    #[error("sweep grid: {0}")]
    Grid(String),
    #[error("{study} is not monotone for {series}: {value} at {at} after {previous}")]
    Monotonicity {
        study: &'static str,
        series: String,
        at: f64,
        value: f64,
        previous: f64,
    },
}

impl ExperimentError {
    pub fn code(&self) -> &'static str {
        match self {
            ExperimentError::Dispatch { source, .. } => source.code(),
            ExperimentError::Attack(e) => e.code(),
            ExperimentError::Metrics { source, .. } => source.code(),
            ExperimentError::Grid(_) => "experiments::grid",
            ExperimentError::Monotonicity { .. } => "experiments::monotonicity",
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, ExperimentError::Dispatch { source, .. } if source.is_infeasible())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Alpha,
    Q0,
}

impl SweepParameter {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepParameter::Alpha => "alpha",
            SweepParameter::Q0 => "q0",
        }
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for SweepParameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "alpha" => Ok(SweepParameter::Alpha),
            "q0" => Ok(SweepParameter::Q0),
            other => Err(format!("unknown sweep parameter {other}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub from: f64,
    pub to: f64,
    pub step: f64,
    /// Budgets and mode for everything not swept; `target_line` is ignored.
    pub base: AttackSpec,
    pub targets: Vec<usize>,
    pub scenarios: Vec<String>,
}

impl SweepSpec {
    /// α from 0.1 to 1.0 in steps of 0.1, limited mode, on lines 10, 28, 23.
    pub fn default_alpha() -> Self {
        Self {
            parameter: SweepParameter::Alpha,
            from: 0.1,
            to: 1.0,
            step: 0.1,
            base: AttackSpec::new(0, ChannelMode::Limited),
            targets: vec![10, 28, 23],
            scenarios: vec!["high".into()],
        }
    }

    /// Q0 from 0 to 100 MW in steps of 10 on line 23.
    pub fn default_q0() -> Self {
        Self {
            parameter: SweepParameter::Q0,
            from: 0.0,
            to: 100.0,
            step: 10.0,
            base: AttackSpec::new(0, ChannelMode::Limited),
            targets: vec![23],
            scenarios: vec!["high".into()],
        }
    }

    pub fn check(&self) -> Result<(), ExperimentError> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(ExperimentError::Grid(format!("step {} must be positive", self.step)));
        }
        if !(self.from <= self.to) {
            return Err(ExperimentError::Grid(format!("from {} exceeds to {}", self.from, self.to)));
        }
        Ok(())
    }

    /// Grid points `from + i·step` up to `to`, tolerant of float drift.
    pub fn grid(&self) -> Result<Vec<f64>, ExperimentError> {
        self.check()?;
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize;
        Ok((0..=n).map(|i| round12(self.from + i as f64 * self.step)).collect())
    }

    fn spec_at(&self, target: usize, value: f64, mode: ChannelMode) -> AttackSpec {
        let mut s = AttackSpec {
            target_line: target,
            mode,
            ..self.base
        };
        match self.parameter {
            SweepParameter::Alpha => s.alpha = value,
            SweepParameter::Q0 => s.q0 = value,
        }
        s
    }
}

fn round12(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

/// Shipped-scenario label paired with its data.
pub type NamedScenario<'a> = (&'a str, &'a DemandScenario);

fn dispatch_err(scenario: &str) -> impl Fn(DispatchError) -> ExperimentError + '_ {
    move |source| ExperimentError::Dispatch {
        scenario: scenario.to_string(),
        source,
    }
}

/// First SCED-DR window of a scenario, the fixed point every attack targets.
pub fn attack_baseline(case: &GridCase, scenario: NamedScenario<'_>, dr_costs: DrCostConfig) -> Result<DispatchSolution, ExperimentError> {
    let p = DispatchProblem::new(case, scenario.1, DispatchMode::ScedDr)
        .with_dr_costs(dr_costs)
        .with_horizon(DEFAULT_HORIZON);
    solve_window(&p, 0).map_err(dispatch_err(scenario.0))
}

/// Rolls SCED and SCED-DR for each scenario and reports their metrics.
pub fn run_benefit_study(
    case: &GridCase,
    scenarios: &[NamedScenario<'_>],
    dr_costs: DrCostConfig,
    windows: usize,
) -> Result<Vec<MetricsReport>, ExperimentError> {
    scenarios
        .par_iter()
        .map(|&(label, s)| {
            let sced = roll(&DispatchProblem::new(case, s, DispatchMode::Sced), windows).map_err(dispatch_err(label))?;
            let dr = roll(&DispatchProblem::new(case, s, DispatchMode::ScedDr).with_dr_costs(dr_costs), windows)
                .map_err(dispatch_err(label))?;
            MetricsReport::new(case, label, &sced, &dr).map_err(|source| ExperimentError::Metrics {
                scenario: label.to_string(),
                source,
            })
        })
        .collect()
}

/// Pre-attack first-interval loading of every line, highest first.
pub fn loading_profile(case: &GridCase, baseline: &DispatchSolution) -> Vec<LineLoading> {
    line_loadings(case, baseline)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub target_line: usize,
    pub mode: ChannelMode,
    pub value: f64,
    pub pre_flow_mw: f64,
    pub objective_flow_mw: f64,
    pub loading_pre: f64,
    pub loading_post: f64,
    pub overload_mw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub parameter: SweepParameter,
    pub rows: Vec<SweepRow>,
    /// Targets left out, with the reason.
    pub skipped: Vec<(usize, String)>,
}

pub const SWEEP_CSV_HEADER: [&str; 9] = [
    "target",
    "mode",
    "parameter",
    "value",
    "pre_flow_mw",
    "objective_flow_mw",
    "loading_pre",
    "loading_post",
    "overload_mw",
];

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SWEEP_CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.target_line.to_string(),
                r.mode.to_string(),
                self.parameter.to_string(),
                format!("{}", r.value),
                format!("{:.6}", r.pre_flow_mw),
                format!("{:.6}", r.objective_flow_mw),
                format!("{:.6}", r.loading_pre),
                format!("{:.6}", r.loading_post),
                format!("{:.6}", r.overload_mw),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Rows of one (target, mode) series in grid order.
    pub fn series(&self, target: usize, mode: ChannelMode) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.target_line == target && r.mode == mode).collect()
    }

    /// Fails on the first series whose objective flow drops along the grid.
    pub fn check_monotone(&self) -> Result<(), ExperimentError> {
        let study = match self.parameter {
            SweepParameter::Alpha => "alpha sweep",
            SweepParameter::Q0 => "q0 sweep",
        };
        for pair in self.rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if a.target_line != b.target_line || a.mode != b.mode {
                continue;
            }
            if b.objective_flow_mw < a.objective_flow_mw - MONOTONE_TOL * (1.0 + a.objective_flow_mw.abs()) {
                return Err(ExperimentError::Monotonicity {
                    study,
                    series: format!("line {} {}", b.target_line, b.mode),
                    at: b.value,
                    value: b.objective_flow_mw,
                    previous: a.objective_flow_mw,
                });
            }
        }
        Ok(())
    }
}

fn sweep(
    case: &GridCase,
    baseline: &DispatchSolution,
    sweep: &SweepSpec,
    targets: &[usize],
    modes: &[ChannelMode],
) -> Result<SweepTable, ExperimentError> {
    let grid = sweep.grid()?;
    let mut skipped = Vec::new();
    let mut live = Vec::new();
    for &t in targets {
        // Probe once with the base spec so invalid targets are reported up
        // front; zero-flow targets are skipped, anything else is fatal.
        match run_attack(baseline, &sweep.spec_at(t, grid[0], modes[0]), case) {
            Ok(_) => live.push(t),
            Err(e @ AttackError::ZeroFlow(_)) => skipped.push((t, e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    let mut points: Vec<(usize, ChannelMode, f64)> = Vec::new();
    for &t in &live {
        for &m in modes {
            points.extend(grid.iter().map(|&v| (t, m, v)));
        }
    }
    let rows = points
        .par_iter()
        .map(|&(t, m, v)| {
            let r = run_attack(baseline, &sweep.spec_at(t, v, m), case)?;
            Ok(SweepRow {
                target_line: t,
                mode: m,
                value: v,
                pre_flow_mw: r.pre_attack_flow_mw,
                objective_flow_mw: r.objective_flow_mw,
                loading_pre: r.loading_rate_pre,
                loading_post: r.loading_rate_post,
                overload_mw: r.overload_mw,
            })
        })
        .collect::<Result<Vec<_>, AttackError>>()?;
    let table = SweepTable {
        parameter: sweep.parameter,
        rows,
        skipped,
    };
    table.check_monotone()?;
    Ok(table)
}

/// Limited-mode attack on each target over the α grid.
pub fn run_alpha_sweep(case: &GridCase, baseline: &DispatchSolution, targets: &[usize], spec: &SweepSpec) -> Result<SweepTable, ExperimentError> {
    if spec.parameter != SweepParameter::Alpha {
        return Err(ExperimentError::Grid("alpha sweep needs parameter alpha".into()));
    }
    sweep(case, baseline, spec, targets, &[ChannelMode::Limited])
}

/// Both channel modes on one target over the Q0 grid.
pub fn run_q0_sweep(case: &GridCase, baseline: &DispatchSolution, target: usize, spec: &SweepSpec) -> Result<SweepTable, ExperimentError> {
    if spec.parameter != SweepParameter::Q0 {
        return Err(ExperimentError::Grid("q0 sweep needs parameter q0".into()));
    }
    sweep(case, baseline, spec, &[target], &[ChannelMode::Limited, ChannelMode::Unlimited])
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemandLevelRow {
    pub scenario: String,
    pub pre_flow_mw: f64,
    pub objective_flow_mw: f64,
    pub loading_pre: f64,
    pub loading_post: f64,
    pub delta: f64,
    pub overload_mw: f64,
}

pub const DEMAND_LEVEL_CSV_HEADER: [&str; 8] = [
    "scenario",
    "target",
    "pre_flow_mw",
    "objective_flow_mw",
    "loading_pre",
    "loading_post",
    "loading_delta",
    "overload_mw",
];

#[derive(Debug, Clone, PartialEq)]
pub struct DemandLevelTable {
    pub target_line: usize,
    pub rows: Vec<DemandLevelRow>,
}

impl DemandLevelTable {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(DEMAND_LEVEL_CSV_HEADER).expect("in-memory write");
        for r in &self.rows {
            w.write_record([
                r.scenario.clone(),
                self.target_line.to_string(),
                format!("{:.6}", r.pre_flow_mw),
                format!("{:.6}", r.objective_flow_mw),
                format!("{:.6}", r.loading_pre),
                format!("{:.6}", r.loading_post),
                format!("{:.6}", r.delta),
                format!("{:.6}", r.overload_mw),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

/// One attack per scenario on the same target. `spec.mode` is normally
/// unlimited; `spec.target_line` is overridden by `target`.
pub fn run_demand_level_study(
    case: &GridCase,
    baselines: &[(&str, &DispatchSolution)],
    target: usize,
    spec: &AttackSpec,
) -> Result<DemandLevelTable, ExperimentError> {
    let spec = AttackSpec { target_line: target, ..*spec };
    let rows = baselines
        .par_iter()
        .map(|&(label, sol)| {
            let r = run_attack(sol, &spec, case)?;
            Ok(DemandLevelRow {
                scenario: label.to_string(),
                pre_flow_mw: r.pre_attack_flow_mw,
                objective_flow_mw: r.objective_flow_mw,
                loading_pre: r.loading_rate_pre,
                loading_post: r.loading_rate_post,
                delta: r.loading_rate_post - r.loading_rate_pre,
                overload_mw: r.overload_mw,
            })
        })
        .collect::<Result<Vec<_>, AttackError>>()?;
    Ok(DemandLevelTable { target_line: target, rows })
}

/// `<study>_<scenario>_<target>.csv`, with `all` when a study spans targets.
pub fn output_file_name(study: &str, scenario: &str, target: Option<usize>) -> String {
    match target {
        Some(t) => format!("{study}_{scenario}_{t}.csv"),
        None => format!("{study}_{scenario}_all.csv"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let s = SweepSpec::default_alpha();
        let g = s.grid().unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[2], 0.3);
        assert_eq!(g[9], 1.0);
        assert_eq!(SweepSpec::default_q0().grid().unwrap().len(), 11);
        let bad = SweepSpec { step: 0.0, ..SweepSpec::default_q0() };
        assert!(bad.grid().is_err());
        let bad = SweepSpec { from: 2.0, to: 1.0, ..SweepSpec::default_q0() };
        assert_eq!(bad.grid().unwrap_err().code(), "experiments::grid");
    }

    #[test]
    fn monotone_check_flags_drop() {
        let row = |v: f64, f: f64| SweepRow {
            target_line: 1,
            mode: ChannelMode::Limited,
            value: v,
            pre_flow_mw: 1.0,
            objective_flow_mw: f,
            loading_pre: 0.0,
            loading_post: 0.0,
            overload_mw: 0.0,
        };
        let mut t = SweepTable { parameter: SweepParameter::Alpha, rows: vec![row(0.1, 5.0), row(0.2, 6.0)], skipped: vec![] };
        assert!(t.check_monotone().is_ok());
        t.rows.push(row(0.3, 5.5));
        assert_eq!(t.check_monotone().unwrap_err().code(), "experiments::monotonicity");
    }

    #[test]
    fn file_names() {
        assert_eq!(output_file_name("alpha_sweep", "high", Some(23)), "alpha_sweep_high_23.csv");
        assert_eq!(output_file_name("benefit", "all", None), "benefit_all_all.csv");
    }
}
