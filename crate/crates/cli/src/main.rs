//! `gridraid`: dispatch, demand-response and DR-signal attack simulator.
//!
//! Exit codes: 0 success, 1 data or validation error, 2 infeasible dispatch,
//! 3 usage error.

mod commands;
mod inputs;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

const DEFAULTS: &str = "\
Defaults:
  parameter      value    flag
  alpha          0.3      --alpha
  q0             100 MW   --q0
  s0             10 rad   --s0
  dr_fraction    0.3      case PARAMS
  horizon        4        --horizon
  windows        4        --windows
  dr costs       case PARAMS, else 1,2,3 $/MW   --dr-costs
  output dir     out      --out or GRIDRAID_OUT";

#[derive(Parser, Debug)]
#[command(name = "gridraid", version, about = "SCED / SCED-DR dispatch and DR-signal attack simulator", after_help = DEFAULTS)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a case (and scenario) against every data invariant.
    #[command(after_help = DEFAULTS)]
    Validate(CommonArgs),
    /// Roll SCED or SCED-DR over the scenario and write per-window results.
    #[command(after_help = DEFAULTS)]
    Dispatch(DispatchArgs),
    /// Attack the first SCED-DR interval through false DR signals.
    #[command(after_help = DEFAULTS)]
    Attack(AttackArgs),
    /// Sweep alpha or Q0 for an attack.
    #[command(after_help = DEFAULTS)]
    Sweep(SweepArgs),
    /// Benefit study, loading profile and demand-level attack comparison.
    #[command(after_help = DEFAULTS)]
    Study(StudyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// Case file; `rts24` or `rts24.case` selects the embedded case when no
    /// such file exists.
    #[arg(long, default_value = "rts24")]
    pub case: String,
    /// Scenario label (low, medium, high) or path to a LOAD file.
    #[arg(long, default_value = "high")]
    pub scenario: String,
    /// Output directory.
    #[arg(long, env = "GRIDRAID_OUT", default_value = "out")]
    pub out: PathBuf,
    /// DR penalties for 15, 30 and 45 minute shifts, $/MW, comma-separated.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub dr_costs: Option<Vec<f64>>,
    /// Look-ahead intervals per window.
    #[arg(long, default_value_t = 4)]
    pub horizon: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Sced,
    #[value(name = "sced-dr")]
    ScedDr,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum ChannelArg {
    Limited,
    Unlimited,
}

#[derive(Args, Debug)]
pub struct DispatchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "sced-dr")]
    pub mode: ModeArg,
    /// Windows to roll; each implements one interval.
    #[arg(long, default_value_t = 4)]
    pub windows: usize,
}

#[derive(Args, Debug, Clone)]
pub struct BudgetArgs {
    /// Load-shift deviation factor (limited mode).
    #[arg(long, default_value_t = 0.3)]
    pub alpha: f64,
    /// l1 budget on DR-signal deviations, MW.
    #[arg(long, default_value_t = 100.0)]
    pub q0: f64,
    /// l1 budget on angle deviations, rad.
    #[arg(long, default_value_t = 10.0)]
    pub s0: f64,
}

#[derive(Args, Debug)]
pub struct AttackArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Target line id.
    #[arg(long)]
    pub target: usize,
    #[arg(long, value_enum, default_value = "limited")]
    pub mode: ChannelArg,
    #[command(flatten)]
    pub budgets: BudgetArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum ParamArg {
    Alpha,
    Q0,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Swept parameter: alpha (limited mode, default 0.1..1.0 step 0.1 on
    /// lines 10,28,23) or q0 (both modes, default 0..100 step 10 on line 23).
    #[arg(long, value_enum, default_value = "alpha")]
    pub parameter: ParamArg,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub step: Option<f64>,
    /// Target lines, comma-separated; a q0 sweep uses the first.
    #[arg(long, value_delimiter = ',')]
    pub targets: Option<Vec<usize>>,
    #[command(flatten)]
    pub budgets: BudgetArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum StudyKind {
    Benefit,
    #[value(name = "demand-level")]
    DemandLevel,
    All,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, default_value = "all")]
    pub kind: StudyKind,
    /// Scenarios, comma-separated labels or LOAD paths.
    #[arg(long, value_delimiter = ',', default_value = "low,medium,high")]
    pub scenarios: Vec<String>,
    /// Windows rolled per scenario.
    #[arg(long, default_value_t = 4)]
    pub windows: usize,
    /// Target line of the demand-level study.
    #[arg(long, default_value_t = 23)]
    pub target: usize,
    #[command(flatten)]
    pub budgets: BudgetArgs,
}

/// Failure with its exit code and a module-qualified code.
#[derive(Debug)]
pub struct Failure {
    pub exit: u8,
    pub code: String,
    pub message: String,
}

impl Failure {
    pub fn data(code: &str, message: impl Into<String>) -> Self {
        Self { exit: 1, code: code.into(), message: message.into() }
    }

    pub fn infeasible(code: &str, message: impl Into<String>) -> Self {
        Self { exit: 2, code: code.into(), message: message.into() }
    }

    pub fn usage(code: &str, message: impl Into<String>) -> Self {
        Self { exit: 3, code: code.into(), message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("usage error").trim_start_matches("error: ");
            eprintln!("error[cli::usage]: {line}");
            return ExitCode::from(3);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error[{}]: {}", f.code, f.message.lines().next().unwrap_or(""));
            ExitCode::from(f.exit)
        }
    }
}
