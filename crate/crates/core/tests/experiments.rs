mod common;

use gridraid_core::attack::{AttackSpec, ChannelMode};
use gridraid_core::experiments::{
    attack_baseline, gnuplot_script, loading_profile, run_alpha_sweep, run_benefit_study, run_demand_level_study, run_q0_sweep, SweepSpec,
};
use gridraid_core::grid_model::shipped::rts24_scenario;
use gridraid_core::grid_model::DemandLevel;
use gridraid_core::metrics::MetricsReport;

#[test]
fn benefit_study_directions() {
    let (c, costs) = common::shipped();
    let scen: Vec<_> = DemandLevel::SHIPPED.iter().map(|&l| (l.as_str(), rts24_scenario(l))).collect();
    let named: Vec<_> = scen.iter().map(|(l, s)| (*l, s)).collect();
    let reports = run_benefit_study(&c.grid, &named, costs, 4).unwrap();
    assert_eq!(reports.iter().map(|r| r.scenario.as_str()).collect::<Vec<_>>(), ["low", "medium", "high"]);
    let low = &reports[0];
    assert!(low.savings_usd.abs() <= 1e-6);
    assert_eq!(low.sced_dr.dr_shift.total(), 0.0);
    assert_eq!(low.sced.net_demand_series, low.sced_dr.net_demand_series);
    for r in &reports[1..] {
        assert!(r.savings_usd > 0.0, "{}", r.scenario);
        assert!(r.sced_dr.load_factor > r.sced.load_factor, "{}", r.scenario);
        assert!(r.sced_dr.dr_shift.total() > 0.0);
    }
    for r in &reports {
        assert!(r.sced.load_factor > 0.0 && r.sced.load_factor <= 1.0);
        assert!(r.savings_usd >= -1e-6);
    }
    let single = run_benefit_study(&c.grid, &named[2..], costs, 4).unwrap();
    assert_eq!(single.len(), 1);
    let csv = MetricsReport::summary_csv(&reports);
    assert_eq!(csv.lines().count(), 7);
    assert!(reports[2].to_string().contains("load factor"));
}

#[test]
fn sweeps_have_expected_shape_and_are_deterministic() {
    let (c, costs) = common::shipped();
    let s = rts24_scenario(DemandLevel::High);
    let base = attack_baseline(&c.grid, ("high", &s), costs).unwrap();
    let a = SweepSpec::default_alpha();
    let t1 = run_alpha_sweep(&c.grid, &base, &a.targets, &a).unwrap();
    assert_eq!(t1.rows.len(), 30);
    let t2 = run_alpha_sweep(&c.grid, &base, &a.targets, &a).unwrap();
    assert_eq!(t1.to_csv(), t2.to_csv());
    let at03 = t1.rows.iter().find(|r| r.target_line == 23 && (r.value - 0.3).abs() < 1e-12).unwrap();
    assert!(at03.loading_post > 1.0);

    let q = SweepSpec::default_q0();
    let qt = run_q0_sweep(&c.grid, &base, 23, &q).unwrap();
    assert_eq!(qt.rows.len(), 22);
    assert_eq!(qt.to_csv(), run_q0_sweep(&c.grid, &base, 23, &q).unwrap().to_csv());
    for r in qt.rows.iter().filter(|r| r.value == 0.0) {
        assert!((r.loading_post - r.loading_pre).abs() <= 1e-9);
    }
    let lim = qt.series(23, ChannelMode::Limited);
    let unl = qt.series(23, ChannelMode::Unlimited);
    assert!(unl.last().unwrap().overload_mw >= lim.last().unwrap().overload_mw);
    // The limited series stops growing once the alpha bounds bind.
    assert!((lim[10].objective_flow_mw - lim[9].objective_flow_mw).abs() < 1e-6);

    let zero = SweepSpec { from: 0.0, to: 0.0, ..SweepSpec::default_alpha() };
    let z = run_alpha_sweep(&c.grid, &base, &[23], &zero).unwrap();
    assert!((z.rows[0].loading_post - z.rows[0].loading_pre).abs() <= 1e-9);

    let script = gnuplot_script(&t1, "alpha_sweep_high_all.csv");
    assert!(script.contains("alpha_sweep_high_all.csv") && script.contains("line 28 limited"));
}

#[test]
fn demand_level_study_orders_scenarios() {
    let (c, costs) = common::shipped();
    let scen: Vec<_> = DemandLevel::SHIPPED.iter().map(|&l| (l.as_str(), rts24_scenario(l))).collect();
    let bases: Vec<_> = scen.iter().map(|(l, s)| (*l, attack_baseline(&c.grid, (l, s), costs).unwrap())).collect();
    let refs: Vec<_> = bases.iter().map(|(l, b)| (*l, b)).collect();
    let t = run_demand_level_study(&c.grid, &refs, 23, &AttackSpec::new(23, ChannelMode::Unlimited)).unwrap();
    assert_eq!(t.rows.len(), 3);
    for r in &t.rows {
        assert!(r.loading_post >= r.loading_pre - 1e-12);
    }
    assert!(t.rows[2].delta >= t.rows[0].delta);
    assert_eq!(t.to_csv().lines().count(), 4);
    let profile = loading_profile(&c.grid, &bases[2].1);
    assert_eq!(profile[0].line_id, 23);
    assert!((profile[0].loading_rate - 1.0).abs() < 1e-9);
}

#[test]
fn invalid_sweep_inputs() {
    let (c, costs) = common::shipped();
    let s = rts24_scenario(DemandLevel::High);
    let base = attack_baseline(&c.grid, ("high", &s), costs).unwrap();
    let a = SweepSpec::default_alpha();
    let e = run_alpha_sweep(&c.grid, &base, &[999], &a).unwrap_err();
    assert_eq!(e.to_string(), "unknown line 999");
    let q = SweepSpec::default_q0();
    assert_eq!(run_alpha_sweep(&c.grid, &base, &[23], &q).unwrap_err().code(), "experiments::grid");
}
