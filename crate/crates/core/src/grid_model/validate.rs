use super::{DemandScenario, GridCase};
use std::collections::HashSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub code: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub bus_count: usize,
    pub line_count: usize,
    pub generator_count: usize,
    pub committed_count: usize,
    pub committed_capacity_mw: f64,
    pub total_capacity_mw: f64,
    /// Peak system demand, when a scenario was checked.
    pub peak_load_mw: Option<f64>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "buses               {:>8}", self.bus_count)?;
        writeln!(f, "lines               {:>8}", self.line_count)?;
        writeln!(f, "generators          {:>8}", self.generator_count)?;
        writeln!(f, "committed units     {:>8}", self.committed_count)?;
        writeln!(f, "committed capacity  {:>8.1} MW", self.committed_capacity_mw)?;
        writeln!(f, "total capacity      {:>8.1} MW", self.total_capacity_mw)?;
        if let Some(p) = self.peak_load_mw {
            writeln!(f, "peak load           {p:>8.1} MW")?;
        }
        if self.violations.is_empty() {
            writeln!(f, "no violations")
        } else {
            writeln!(f, "{} violation(s):", self.violations.len())?;
            for v in &self.violations {
                writeln!(f, "  {v}")?;
            }
            Ok(())
        }
    }
}

fn push(v: &mut Vec<Violation>, code: &'static str, message: String) {
    v.push(Violation { code, message });
}

/// Checks every grid invariant and reports violations as data.
pub fn validate(case: &GridCase) -> ValidationReport {
    let mut v = Vec::new();

    let mut ids = HashSet::new();
    for b in &case.buses {
        if !ids.insert(b.id) {
            push(&mut v, "duplicate_bus", format!("bus id {} appears more than once", b.id));
        }
    }
    match case.buses.iter().filter(|b| b.is_slack).count() {
        0 => push(&mut v, "no_slack", "no slack bus".to_string()),
        1 => {}
        n => push(&mut v, "multiple_slack", format!("multiple slack buses ({n})")),
    }

    let mut line_ids = HashSet::new();
    for l in &case.lines {
        if !line_ids.insert(l.id) {
            push(&mut v, "duplicate_line", format!("line id {} appears more than once", l.id));
        }
        if !(l.susceptance_mw_per_rad > 0.0) {
            push(
                &mut v,
                "line_susceptance",
                format!("line {} susceptance {} MW/rad is not positive", l.id, l.susceptance_mw_per_rad),
            );
        }
        if !(l.rating_mw > 0.0) {
            push(
                &mut v,
                "line_rating",
                format!("line {} rating {} MW is not positive", l.id, l.rating_mw),
            );
        }
        if l.from_bus == l.to_bus {
            push(&mut v, "line_self_loop", format!("line {} connects bus {} to itself", l.id, l.from_bus));
        }
        for bus in [l.from_bus, l.to_bus] {
            if !ids.contains(&bus) {
                push(&mut v, "dangling_bus", format!("line {} references unknown bus {bus}", l.id));
            }
        }
    }

    let mut gen_ids = HashSet::new();
    for g in &case.generators {
        if !gen_ids.insert(g.id) {
            push(&mut v, "duplicate_gen", format!("generator id {} appears more than once", g.id));
        }
        if !(g.p_min_mw >= 0.0 && g.p_min_mw <= g.p_max_mw) {
            push(
                &mut v,
                "gen_limits",
                format!("generator {} limits [{}, {}] MW are not ordered and nonnegative", g.id, g.p_min_mw, g.p_max_mw),
            );
        }
        if !(g.cost_per_mwh >= 0.0) {
            push(&mut v, "gen_cost", format!("generator {} cost {} is negative", g.id, g.cost_per_mwh));
        }
        if !ids.contains(&g.bus) {
            push(&mut v, "dangling_bus", format!("generator {} references unknown bus {}", g.id, g.bus));
        }
    }

    ValidationReport {
        violations: v,
        bus_count: case.buses.len(),
        line_count: case.lines.len(),
        generator_count: case.generators.len(),
        committed_count: case.committed_generators().count(),
        committed_capacity_mw: case.committed_capacity_mw(),
        total_capacity_mw: case.generators.iter().map(|g| g.p_max_mw).sum(),
        peak_load_mw: None,
    }
}

/// Grid checks plus scenario checks (nonnegative demand, DR fraction in
/// [0, 1], loads on known buses).
pub fn validate_with_scenario(case: &GridCase, scenario: &DemandScenario) -> ValidationReport {
    let mut report = validate(case);
    let v = &mut report.violations;
    let ids: HashSet<usize> = case.buses.iter().map(|b| b.id).collect();
    for (&bus, series) in &scenario.demand_mw {
        if !ids.contains(&bus) {
            push(v, "dangling_bus", format!("load references unknown bus {bus}"));
        }
        if let Some((t, d)) = series.iter().enumerate().find(|(_, d)| !(**d >= 0.0)) {
            push(v, "negative_demand", format!("bus {bus} demand {d} MW in interval {} is negative", t + 1));
        }
    }
    if !(0.0..=1.0).contains(&scenario.dr_fraction) {
        push(v, "dr_fraction", format!("dr_fraction {} outside [0, 1]", scenario.dr_fraction));
    }
    if !(scenario.interval_minutes > 0.0) {
        push(v, "interval_minutes", format!("interval length {} min is not positive", scenario.interval_minutes));
    }
    report.peak_load_mw = Some(scenario.peak_mw());
    report
}
