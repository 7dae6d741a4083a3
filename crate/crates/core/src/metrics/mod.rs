//! Benefit and vulnerability metrics: costs and savings, load factor, DR
//! shift totals, line loading rates and attack overloads.

use crate::attack::AttackResult;
use crate::dispatch::{DispatchMode, DispatchSolution, RollResult};
use crate::grid_model::GridCase;
use std::fmt;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("rating {0} MW is not positive")]
    NonPositiveRating(f64),
    #[error("load factor of an empty series")]
    EmptySeries,
    #[error("load factor of a series with no positive peak")]
    NoPeak,
}

impl MetricsError {
    pub fn code(&self) -> &'static str {
        match self {
            MetricsError::NonPositiveRating(_) => "metrics::rating",
            MetricsError::EmptySeries => "metrics::empty_series",
            MetricsError::NoPeak => "metrics::no_peak",
        }
    }
}

pub fn loading_rate(flow_mw: f64, rating_mw: f64) -> Result<f64, MetricsError> {
    if !(rating_mw > 0.0) {
        return Err(MetricsError::NonPositiveRating(rating_mw));
    }
    Ok(flow_mw.abs() / rating_mw)
}

/// Mean over peak.
pub fn load_factor(series: &[f64]) -> Result<f64, MetricsError> {
    if series.is_empty() {
        return Err(MetricsError::EmptySeries);
    }
    let peak = series.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(peak > 0.0) {
        return Err(MetricsError::NoPeak);
    }
    Ok(series.iter().sum::<f64>() / series.len() as f64 / peak)
}

/// Implemented DR by class, MW.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DrShiftTotals {
    pub mw_15: f64,
    pub mw_30: f64,
    pub mw_45: f64,
}

impl DrShiftTotals {
    pub fn total(&self) -> f64 {
        self.mw_15 + self.mw_30 + self.mw_45
    }
}

/// Sums the first-interval DR of each rolled window.
pub fn dr_shift_summary(windows: &[DispatchSolution]) -> DrShiftTotals {
    let first = |m: &[Vec<f64>]| -> f64 { m.iter().map(|r| r[0]).sum() };
    windows.iter().fold(DrShiftTotals::default(), |acc, w| DrShiftTotals {
        mw_15: acc.mw_15 + first(&w.dr15),
        mw_30: acc.mw_30 + first(&w.dr30),
        mw_45: acc.mw_45 + first(&w.dr45),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeMetrics {
    pub mode: DispatchMode,
    /// Sum of implemented first-interval costs over the roll.
    pub total_cost_usd: f64,
    /// Full objective of the first window.
    pub window1_objective_usd: f64,
    /// System net demand served per implemented interval.
    pub net_demand_series: Vec<f64>,
    pub load_factor: f64,
    pub peak_net_demand_mw: f64,
    pub dr_shift: DrShiftTotals,
}

impl ModeMetrics {
    pub fn from_roll(r: &RollResult) -> Result<Self, MetricsError> {
        let series = r.net_demand_series();
        Ok(Self {
            mode: r.windows.first().map_or(DispatchMode::Sced, |w| w.mode),
            total_cost_usd: r.total_cost_usd(),
            window1_objective_usd: r.windows.first().map_or(0.0, |w| w.objective_usd),
            load_factor: load_factor(&series)?,
            peak_net_demand_mw: series.iter().copied().fold(0.0, f64::max),
            net_demand_series: series,
            dr_shift: dr_shift_summary(&r.windows),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LineLoading {
    pub line_id: usize,
    pub flow_mw: f64,
    pub rating_mw: f64,
    pub loading_rate: f64,
}

/// First-interval loading of every line, highest first; ties by line id.
pub fn line_loadings(case: &GridCase, sol: &DispatchSolution) -> Vec<LineLoading> {
    let mut v: Vec<LineLoading> = case
        .lines
        .iter()
        .zip(&sol.flow_kt)
        .map(|(l, f)| LineLoading {
            line_id: l.id,
            flow_mw: f[0],
            rating_mw: l.rating_mw,
            loading_rate: f[0].abs() / l.rating_mw,
        })
        .collect();
    v.sort_by(|a, b| b.loading_rate.total_cmp(&a.loading_rate).then(a.line_id.cmp(&b.line_id)));
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverloadRow {
    pub target_line: usize,
    pub mode: String,
    pub alpha: f64,
    pub q0: f64,
    pub s0: f64,
    pub pre_flow_mw: f64,
    pub post_flow_mw: f64,
    pub rating_mw: f64,
    pub loading_pre: f64,
    pub loading_post: f64,
    pub overload_mw: f64,
}

impl From<&AttackResult> for OverloadRow {
    fn from(r: &AttackResult) -> Self {
        Self {
            target_line: r.spec.target_line,
            mode: r.spec.mode.to_string(),
            alpha: r.spec.alpha,
            q0: r.spec.q0,
            s0: r.spec.s0,
            pre_flow_mw: r.pre_attack_flow_mw,
            post_flow_mw: r.objective_flow_mw * r.pre_attack_flow_mw.signum(),
            rating_mw: r.rating_mw,
            loading_pre: r.loading_rate_pre,
            loading_post: r.loading_rate_post,
            overload_mw: r.overload_mw,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub scenario: String,
    pub sced: ModeMetrics,
    pub sced_dr: ModeMetrics,
    /// Rolled SCED cost minus rolled SCED-DR cost.
    pub savings_usd: f64,
    /// Pre-attack first-interval loadings of the first SCED-DR window.
    pub line_loading: Vec<LineLoading>,
    pub overloads: Vec<OverloadRow>,
}

pub const SUMMARY_CSV_HEADER: [&str; 11] = [
    "scenario",
    "mode",
    "total_cost_usd",
    "window1_objective_usd",
    "savings_usd",
    "load_factor",
    "peak_net_demand_mw",
    "dr15_mw",
    "dr30_mw",
    "dr45_mw",
    "dr_total_mw",
];

pub const LOADING_CSV_HEADER: [&str; 5] = ["rank", "line", "flow_mw", "rating_mw", "loading_rate"];

pub const OVERLOAD_CSV_HEADER: [&str; 11] = [
    "target",
    "mode",
    "alpha",
    "q0_mw",
    "s0_rad",
    "pre_flow_mw",
    "post_flow_mw",
    "rating_mw",
    "loading_pre",
    "loading_post",
    "overload_mw",
];

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

impl MetricsReport {
    pub fn new(case: &GridCase, scenario: &str, sced: &RollResult, sced_dr: &RollResult) -> Result<Self, MetricsError> {
        let s = ModeMetrics::from_roll(sced)?;
        let d = ModeMetrics::from_roll(sced_dr)?;
        Ok(Self {
            scenario: scenario.to_string(),
            savings_usd: s.total_cost_usd - d.total_cost_usd,
            sced: s,
            sced_dr: d,
            line_loading: sced_dr.windows.first().map_or_else(Vec::new, |w| line_loadings(case, w)),
            overloads: Vec::new(),
        })
    }

    pub fn summary_csv(reports: &[MetricsReport]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(SUMMARY_CSV_HEADER).expect("in-memory write");
        for r in reports {
            for m in [&r.sced, &r.sced_dr] {
                let savings = if m.mode == DispatchMode::ScedDr { r.savings_usd } else { 0.0 };
                w.write_record([
                    r.scenario.clone(),
                    m.mode.to_string(),
                    format!("{:.4}", m.total_cost_usd),
                    format!("{:.4}", m.window1_objective_usd),
                    format!("{savings:.4}"),
                    format!("{:.6}", m.load_factor),
                    format!("{:.4}", m.peak_net_demand_mw),
                    format!("{:.4}", m.dr_shift.mw_15),
                    format!("{:.4}", m.dr_shift.mw_30),
                    format!("{:.4}", m.dr_shift.mw_45),
                    format!("{:.4}", m.dr_shift.total()),
                ])
                .expect("in-memory write");
            }
        }
        finish(w)
    }

    pub fn loading_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(LOADING_CSV_HEADER).expect("in-memory write");
        for (i, l) in self.line_loading.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                l.line_id.to_string(),
                format!("{:.4}", l.flow_mw),
                format!("{:.4}", l.rating_mw),
                format!("{:.6}", l.loading_rate),
            ])
            .expect("in-memory write");
        }
        finish(w)
    }

    pub fn overload_csv(rows: &[OverloadRow]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(OVERLOAD_CSV_HEADER).expect("in-memory write");
        for o in rows {
            w.write_record([
                o.target_line.to_string(),
                o.mode.clone(),
                format!("{:.4}", o.alpha),
                format!("{:.4}", o.q0),
                format!("{:.4}", o.s0),
                format!("{:.4}", o.pre_flow_mw),
                format!("{:.4}", o.post_flow_mw),
                format!("{:.4}", o.rating_mw),
                format!("{:.6}", o.loading_pre),
                format!("{:.6}", o.loading_post),
                format!("{:.4}", o.overload_mw),
            ])
            .expect("in-memory write");
        }
        finish(w)
    }
}

impl fmt::Display for MetricsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.scenario)?;
        writeln!(f, "{:<24}{:>16}{:>16}", "", "sced", "sced-dr")?;
        let (s, d) = (&self.sced, &self.sced_dr);
        writeln!(f, "{:<24}{:>16.2}{:>16.2}", "total cost ($)", s.total_cost_usd, d.total_cost_usd)?;
        writeln!(f, "{:<24}{:>16.2}{:>16.2}", "window-1 objective ($)", s.window1_objective_usd, d.window1_objective_usd)?;
        writeln!(f, "{:<24}{:>16.4}{:>16.4}", "load factor", s.load_factor, d.load_factor)?;
        writeln!(f, "{:<24}{:>16.2}{:>16.2}", "peak net demand (MW)", s.peak_net_demand_mw, d.peak_net_demand_mw)?;
        writeln!(f, "{:<24}{:>16.2}{:>16.2}", "DR 15 min (MW)", s.dr_shift.mw_15, d.dr_shift.mw_15)?;
        writeln!(f, "{:<24}{:>16.2}{:>16.2}", "DR 30 min (MW)", s.dr_shift.mw_30, d.dr_shift.mw_30)?;
        writeln!(f, "{:<24}{:>16.2}{:>16.2}", "DR 45 min (MW)", s.dr_shift.mw_45, d.dr_shift.mw_45)?;
        writeln!(f, "{:<24}{:>32.2}", "savings ($)", self.savings_usd)?;
        if !self.line_loading.is_empty() {
            writeln!(f, "most loaded lines (sced-dr, first interval)")?;
            for l in self.line_loading.iter().take(5) {
                writeln!(f, "  line {:>3}{:>12.2} MW / {:>8.2} MW{:>9.1}%", l.line_id, l.flow_mw, l.rating_mw, 100.0 * l.loading_rate)?;
            }
        }
        for o in &self.overloads {
            writeln!(
                f,
                "attack line {:>3} {:<9} alpha {:.2} q0 {:>6.1}: {:>8.2} -> {:>8.2} MW, overload {:.2} MW",
                o.target_line, o.mode, o.alpha, o.q0, o.pre_flow_mw, o.post_flow_mw, o.overload_mw
            )?;
        }
        Ok(())
    }
}
