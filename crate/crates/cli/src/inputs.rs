use crate::{CommonArgs, Failure};
use gridraid_core::dispatch::{DispatchError, DrCostConfig};
use gridraid_core::grid_model::shipped::{rts24, rts24_scenario};
use gridraid_core::grid_model::{parse_case, parse_scenario, CaseFile, DemandLevel, DemandScenario, GridError};
use std::path::Path;

pub struct Inputs {
    pub case: CaseFile,
    pub embedded: bool,
    pub dr_costs: DrCostConfig,
}

pub fn grid_failure(e: &GridError) -> Failure {
    Failure::data(e.code(), e.to_string())
}

pub fn dispatch_failure(e: &DispatchError) -> Failure {
    if e.is_infeasible() {
        Failure::infeasible(e.code(), e.to_string())
    } else {
        Failure::data(e.code(), e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::data("cli::io", format!("cannot read {}: {e}", path.display())))
}

pub fn load(args: &CommonArgs) -> Result<Inputs, Failure> {
    let path = Path::new(&args.case);
    let (case, embedded) = if path.is_file() {
        (parse_case(&read(path)?).map_err(|e| grid_failure(&e))?, false)
    } else if matches!(args.case.as_str(), "rts24" | "rts24.case") {
        (rts24(), true)
    } else {
        return Err(Failure::data("cli::case_not_found", format!("case file {} not found", args.case)));
    };
    let dr_costs = match (&args.dr_costs, case.dr_costs) {
        (Some(v), _) => DrCostConfig::from_array([v[0], v[1], v[2]]),
        (None, Some(c)) => DrCostConfig::from_array(c),
        (None, None) => Ok(DrCostConfig::default()),
    }
    .map_err(|e| Failure::usage(e.code(), e.to_string()))?;
    Ok(Inputs { case, embedded, dr_costs })
}

impl Inputs {
    /// Resolves a scenario argument: an existing LOAD file, a shipped label
    /// on the embedded case, or the case file's own LOAD section when its
    /// label matches.
    pub fn scenario(&self, arg: &str) -> Result<(String, DemandScenario), Failure> {
        let path = Path::new(arg);
        if path.is_file() {
            let s = parse_scenario(&read(path)?).map_err(|e| grid_failure(&e))?;
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
            let label = if s.label == DemandLevel::Custom { stem.to_string() } else { s.label.to_string() };
            return Ok((label, s));
        }
        let level: DemandLevel = arg
            .parse()
            .map_err(|_| Failure::data("cli::scenario_not_found", format!("scenario {arg} is neither a shipped label nor a file")))?;
        if self.embedded && level != DemandLevel::Custom {
            return Ok((level.to_string(), rts24_scenario(level)));
        }
        match &self.case.scenario {
            Some(s) if s.label == level => Ok((level.to_string(), s.clone())),
            _ => Err(Failure::data(
                "cli::scenario_not_found",
                format!("case {} carries no {level} scenario; pass a LOAD file", self.case.grid.name),
            )),
        }
    }
}
