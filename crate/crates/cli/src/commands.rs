use crate::inputs::{dispatch_failure, load, Inputs};
use crate::{AttackArgs, BudgetArgs, ChannelArg, Command, CommonArgs, DispatchArgs, Failure, ModeArg, ParamArg, StudyArgs, StudyKind, SweepArgs};
use gridraid_core::attack::{attack_csv, run_attack, AttackError, AttackSpec, ChannelMode};
use gridraid_core::dispatch::{dispatch_csv, roll, DispatchMode, DispatchProblem};
use gridraid_core::experiments::{
    attack_baseline, gnuplot_script, loading_profile, output_file_name, run_alpha_sweep, run_benefit_study, run_demand_level_study,
    run_q0_sweep, ExperimentError, SweepParameter, SweepSpec,
};
use gridraid_core::grid_model::{validate_with_scenario, DemandScenario};
use gridraid_core::metrics::{load_factor, dr_shift_summary, MetricsReport, OverloadRow, LineLoading};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub fn run(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Validate(a) => validate(&a),
        Command::Dispatch(a) => dispatch(&a),
        Command::Attack(a) => attack(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Study(a) => study(&a),
    }
}

fn experiment_failure(e: &ExperimentError) -> Failure {
    if e.is_infeasible() {
        Failure::infeasible(e.code(), e.to_string())
    } else {
        Failure::data(e.code(), e.to_string())
    }
}

fn attack_failure(e: &AttackError) -> Failure {
    Failure::data(e.code(), e.to_string())
}

fn write(out: &Path, name: &str, body: &str) -> Result<PathBuf, Failure> {
    std::fs::create_dir_all(out).map_err(|e| Failure::data("cli::io", format!("cannot create {}: {e}", out.display())))?;
    let p = out.join(name);
    std::fs::write(&p, body).map_err(|e| Failure::data("cli::io", format!("cannot write {}: {e}", p.display())))?;
    println!("wrote {}", p.display());
    Ok(p)
}

fn check_horizon(c: &CommonArgs) -> Result<(), Failure> {
    if c.horizon == 0 {
        return Err(Failure::usage("cli::usage", "--horizon must be at least 1"));
    }
    Ok(())
}

fn channel(m: ChannelArg) -> ChannelMode {
    match m {
        ChannelArg::Limited => ChannelMode::Limited,
        ChannelArg::Unlimited => ChannelMode::Unlimited,
    }
}

fn spec(target: usize, mode: ChannelMode, b: &BudgetArgs) -> AttackSpec {
    AttackSpec {
        target_line: target,
        alpha: b.alpha,
        s0: b.s0,
        q0: b.q0,
        mode,
    }
}

fn validate(a: &CommonArgs) -> Result<(), Failure> {
    let inputs = load(a)?;
    let (label, scenario) = inputs.scenario(&a.scenario)?;
    let report = validate_with_scenario(&inputs.case.grid, &scenario);
    println!("case {} scenario {label}", inputs.case.grid.name);
    print!("{report}");
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Failure::data(
            "grid_model::validation",
            format!("{} violation(s); first: {v}", report.violations.len()),
        )),
    }
}

fn baseline(inputs: &Inputs, c: &CommonArgs, label: &str, s: &DemandScenario) -> Result<gridraid_core::dispatch::DispatchSolution, Failure> {
    check_horizon(c)?;
    if c.horizon != gridraid_core::dispatch::DEFAULT_HORIZON {
        let p = DispatchProblem::new(&inputs.case.grid, s, DispatchMode::ScedDr)
            .with_dr_costs(inputs.dr_costs)
            .with_horizon(c.horizon);
        return gridraid_core::dispatch::solve_window(&p, 0).map_err(|e| dispatch_failure(&e));
    }
    attack_baseline(&inputs.case.grid, (label, s), inputs.dr_costs).map_err(|e| experiment_failure(&e))
}

fn dispatch(a: &DispatchArgs) -> Result<(), Failure> {
    check_horizon(&a.common)?;
    let inputs = load(&a.common)?;
    let (label, scenario) = inputs.scenario(&a.common.scenario)?;
    let mode = match a.mode {
        ModeArg::Sced => DispatchMode::Sced,
        ModeArg::ScedDr => DispatchMode::ScedDr,
    };
    let grid = &inputs.case.grid;
    let p = DispatchProblem::new(grid, &scenario, mode)
        .with_dr_costs(inputs.dr_costs)
        .with_horizon(a.common.horizon);
    let r = roll(&p, a.windows).map_err(|e| dispatch_failure(&e))?;
    let series = r.net_demand_series();
    let totals = dr_shift_summary(&r.windows);
    let mut s = String::new();
    let _ = writeln!(s, "case {} scenario {label} mode {mode} windows {}", grid.name, a.windows);
    let _ = writeln!(s, "{:<28}{:>14.2}", "implemented cost ($)", r.total_cost_usd());
    if let Some(w) = r.windows.first() {
        let _ = writeln!(s, "{:<28}{:>14.2}", "window-1 objective ($)", w.objective_usd);
    }
    if let Ok(lf) = load_factor(&series) {
        let _ = writeln!(s, "{:<28}{:>14.4}", "load factor", lf);
    }
    let _ = writeln!(s, "{:<28}{:>14.2}", "DR 15 min (MW)", totals.mw_15);
    let _ = writeln!(s, "{:<28}{:>14.2}", "DR 30 min (MW)", totals.mw_30);
    let _ = writeln!(s, "{:<28}{:>14.2}", "DR 45 min (MW)", totals.mw_45);
    let _ = writeln!(s, "{:<28}{:>14.2}", "ledger residual (MW)", r.ledger.total_mw());
    for (i, v) in series.iter().enumerate() {
        let _ = writeln!(s, "interval {:<19}{:>14.2} MW served", i + 1, v);
    }
    print!("{s}");
    let stem = format!("dispatch_{label}_{mode}");
    write(&a.common.out, &format!("{stem}.csv"), &dispatch_csv(grid, &r.windows))?;
    write(&a.common.out, &format!("{stem}.txt"), &s)?;
    Ok(())
}

fn attack(a: &AttackArgs) -> Result<(), Failure> {
    let inputs = load(&a.common)?;
    let grid = &inputs.case.grid;
    let spec = spec(a.target, channel(a.mode), &a.budgets);
    spec.check(grid).map_err(|e| attack_failure(&e))?;
    let (label, scenario) = inputs.scenario(&a.common.scenario)?;
    let base = baseline(&inputs, &a.common, &label, &scenario)?;
    let r = run_attack(&base, &spec, grid).map_err(|e| attack_failure(&e))?;
    let row = OverloadRow::from(&r);
    let mut s = String::new();
    let _ = writeln!(s, "case {} scenario {label} target line {} mode {}", grid.name, spec.target_line, spec.mode);
    let _ = writeln!(s, "alpha {} q0 {} MW s0 {} rad", spec.alpha, spec.q0, spec.s0);
    let _ = writeln!(s, "{:<28}{:>12.4} MW", "pre-attack flow", row.pre_flow_mw);
    let _ = writeln!(s, "{:<28}{:>12.4} MW", "post-attack flow", row.post_flow_mw);
    let _ = writeln!(s, "{:<28}{:>12.4} MW", "rating", row.rating_mw);
    let _ = writeln!(s, "{:<28}{:>12.4}", "loading pre", row.loading_pre);
    let _ = writeln!(s, "{:<28}{:>12.4}", "loading post", row.loading_post);
    let _ = writeln!(s, "{:<28}{:>12.4} MW", "overload", row.overload_mw);
    let _ = writeln!(s, "{:<28}{:>12.4} MW", "DR deviation used", r.dr_budget_used);
    let _ = writeln!(s, "{:<28}{:>12.4} rad", "angle deviation used", r.angle_budget_used);
    let _ = writeln!(s, "false load measurements (bus: MW) where DR~ differs from schedule:");
    for (n, b) in grid.buses.iter().enumerate() {
        if (r.false_dr[n] - r.scheduled_dr[n]).abs() > 1e-9 {
            let _ = writeln!(s, "  bus {:>3}: {:>10.4}  (DR {:.4} -> {:.4})", b.id, r.false_load_mw[n], r.scheduled_dr[n], r.false_dr[n]);
        }
    }
    print!("{s}");
    let stem = output_file_name("attack", &label, Some(spec.target_line));
    write(&a.common.out, &stem, &attack_csv(grid, &r))?;
    write(&a.common.out, &stem.replace(".csv", ".txt"), &s)?;
    Ok(())
}

fn sweep(a: &SweepArgs) -> Result<(), Failure> {
    let inputs = load(&a.common)?;
    let grid = &inputs.case.grid;
    let mut spec = match a.parameter {
        ParamArg::Alpha => SweepSpec::default_alpha(),
        ParamArg::Q0 => SweepSpec::default_q0(),
    };
    spec.base = AttackSpec { alpha: a.budgets.alpha, q0: a.budgets.q0, s0: a.budgets.s0, ..spec.base };
    spec.from = a.from.unwrap_or(spec.from);
    spec.to = a.to.unwrap_or(spec.to);
    spec.step = a.step.unwrap_or(spec.step);
    if let Some(t) = &a.targets {
        spec.targets = t.clone();
    }
    spec.check().map_err(|e| Failure::usage(e.code(), e.to_string()))?;
    if spec.targets.is_empty() {
        return Err(Failure::usage("cli::usage", "--targets is empty"));
    }
    for &t in &spec.targets {
        if grid.line_position(t).is_none() {
            return Err(attack_failure(&AttackError::UnknownLine(t)));
        }
    }
    let (label, scenario) = inputs.scenario(&a.common.scenario)?;
    let base = baseline(&inputs, &a.common, &label, &scenario)?;
    let (table, name) = match spec.parameter {
        SweepParameter::Alpha => (
            run_alpha_sweep(grid, &base, &spec.targets, &spec),
            output_file_name("alpha_sweep", &label, if spec.targets.len() == 1 { Some(spec.targets[0]) } else { None }),
        ),
        SweepParameter::Q0 => (
            run_q0_sweep(grid, &base, spec.targets[0], &spec),
            output_file_name("q0_sweep", &label, Some(spec.targets[0])),
        ),
    };
    let table = table.map_err(|e| experiment_failure(&e))?;
    for (t, why) in &table.skipped {
        eprintln!("warning: skipped line {t}: {why}");
    }
    println!("{:>6} {:<10} {:>8} {:>12} {:>12} {:>10}", "target", "mode", spec.parameter.as_str(), "flow_mw", "loading", "overload");
    for r in &table.rows {
        println!(
            "{:>6} {:<10} {:>8} {:>12.4} {:>12.4} {:>10.4}",
            r.target_line, r.mode.as_str(), r.value, r.objective_flow_mw, r.loading_post, r.overload_mw
        );
    }
    let csv_path = write(&a.common.out, &name, &table.to_csv())?;
    let csv_file = csv_path.file_name().and_then(|n| n.to_str()).unwrap_or(&name).to_string();
    write(&a.common.out, &name.replace(".csv", ".gp"), &gnuplot_script(&table, &csv_file))?;
    Ok(())
}

fn loading_text(rows: &[LineLoading]) -> String {
    let mut s = String::new();
    for l in rows.iter().take(10) {
        let _ = writeln!(s, "  line {:>3}{:>12.2} MW / {:>8.2} MW{:>9.1}%", l.line_id, l.flow_mw, l.rating_mw, 100.0 * l.loading_rate);
    }
    s
}

fn study(a: &StudyArgs) -> Result<(), Failure> {
    check_horizon(&a.common)?;
    let inputs = load(&a.common)?;
    let grid = &inputs.case.grid;
    let mut scenarios = Vec::new();
    for s in &a.scenarios {
        scenarios.push(inputs.scenario(s)?);
    }
    let named: Vec<(&str, &DemandScenario)> = scenarios.iter().map(|(l, s)| (l.as_str(), s)).collect();
    let mut text = String::new();
    if matches!(a.kind, StudyKind::Benefit | StudyKind::All) {
        let reports = run_benefit_study(grid, &named, inputs.dr_costs, a.windows).map_err(|e| experiment_failure(&e))?;
        for r in &reports {
            let _ = writeln!(text, "{r}");
        }
        write(&a.common.out, &output_file_name("benefit", "all", None), &MetricsReport::summary_csv(&reports))?;
        for r in &reports {
            write(&a.common.out, &output_file_name("loading", &r.scenario, None), &r.loading_csv())?;
        }
    }
    if matches!(a.kind, StudyKind::DemandLevel | StudyKind::All) {
        if grid.line_position(a.target).is_none() {
            return Err(attack_failure(&AttackError::UnknownLine(a.target)));
        }
        let mut bases = Vec::new();
        for &(l, s) in &named {
            bases.push((l, baseline(&inputs, &a.common, l, s)?));
        }
        if a.kind == StudyKind::DemandLevel {
            for (l, b) in &bases {
                let _ = writeln!(text, "pre-attack loading, scenario {l}");
                text.push_str(&loading_text(&loading_profile(grid, b)));
            }
        }
        let refs: Vec<_> = bases.iter().map(|(l, b)| (*l, b)).collect();
        let spec = spec(a.target, ChannelMode::Unlimited, &a.budgets);
        let table = run_demand_level_study(grid, &refs, a.target, &spec).map_err(|e| experiment_failure(&e))?;
        let _ = writeln!(text, "unlimited-channel attack on line {} (q0 {} MW)", a.target, spec.q0);
        let _ = writeln!(text, "{:<10}{:>12}{:>12}{:>12}{:>12}", "scenario", "pre", "post", "delta", "overload");
        for r in &table.rows {
            let _ = writeln!(
                text,
                "{:<10}{:>12.4}{:>12.4}{:>12.4}{:>12.4}",
                r.scenario, r.loading_pre, r.loading_post, r.delta, r.overload_mw
            );
        }
        write(&a.common.out, &output_file_name("demand_level", "all", Some(a.target)), &table.to_csv())?;
    }
    print!("{text}");
    write(&a.common.out, "study_summary.txt", &text)?;
    Ok(())
}
