mod common;

use gridraid_core::attack::{attack_input, build_fsmi_direct, run_attack, AttackError, AttackSpec, ChannelMode};
use gridraid_core::grid_model::{compute_dc_flows, nodal_injections, DemandLevel};
use gridraid_core::lp::{oracle_solve_with_limits, OracleLimits};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Three buses: six variables, three balance rows and two sets of eight
// sign-pattern budget rows.
const DIRECT_LIMITS: OracleLimits = OracleLimits { max_vars: 6, max_constraints: 19 };

#[test]
fn linearized_budgets_match_direct_absolute_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xa77ac);
    let mut compared = 0;
    let mut moved = 0;
    while compared < 60 {
        let (case, input, spec) = common::random_attack_instance(&mut rng);
        let lin = match attack_input(&input, &spec, &case) {
            Ok(r) => r,
            Err(AttackError::ZeroFlow(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let direct = build_fsmi_direct(&input, &spec, &case).unwrap();
        let o = oracle_solve_with_limits(&direct, &DIRECT_LIMITS).unwrap();
        assert!(o.is_optimal(), "{spec:?}");
        let tol = 1e-6 * (1.0 + o.objective_value.abs());
        assert!((o.objective_value - lin.objective_flow_mw).abs() <= tol, "{spec:?}: direct {} linearized {}", o.objective_value, lin.objective_flow_mw);
        if lin.objective_flow_mw > lin.pre_attack_flow_mw.abs() + 1e-6 {
            moved += 1;
        }
        compared += 1;
    }
    // Most instances must actually move the flow, or the check says little.
    assert!(moved >= 30, "{moved}");
}

#[test]
fn random_instances_respect_anchor_budgets_and_physics() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let (case, input, spec) = common::random_attack_instance(&mut rng);
        let Ok(r) = attack_input(&input, &spec, &case) else { continue };
        assert!(r.objective_flow_mw >= r.pre_attack_flow_mw.abs() - 1e-9);
        assert!(r.angle_budget_used <= spec.s0 + 1e-6);
        assert!(r.dr_budget_used <= spec.q0 + 1e-6);
        let recomputed = compute_dc_flows(&case, &r.attacked_angles).unwrap();
        for (a, b) in recomputed.iter().zip(&r.attacked_flows) {
            assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()), "{a} vs {b}");
        }
        // Attacked balance: generation − served load with false DR.
        let inj = nodal_injections(&case, &r.attacked_flows);
        let mut gen = [0.0; 3];
        for (g, p) in case.generators.iter().zip(&input.fixed_generation) {
            gen[g.bus - 1] += p;
        }
        for n in 0..3 {
            assert!((inj[n] - (gen[n] - r.false_load_mw[n])).abs() < 1e-6);
        }
        if spec.mode == ChannelMode::Limited {
            for (f, s) in r.false_dr.iter().zip(&r.scheduled_dr) {
                if *s == 0.0 {
                    assert_eq!(*f, 0.0);
                }
            }
        }
    }
}

#[test]
fn zero_budgets_reproduce_pre_attack_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let (case, input, spec) = common::random_attack_instance(&mut rng);
        let spec = AttackSpec { q0: 0.0, s0: 0.0, ..spec };
        let Ok(r) = attack_input(&input, &spec, &case) else { continue };
        for (a, b) in r.attacked_flows.iter().zip(&r.pre_attack_flows) {
            assert!((a - b).abs() <= 1e-9, "{a} vs {b}");
        }
        for (a, b) in r.false_dr.iter().zip(&r.scheduled_dr) {
            assert!((a - b).abs() <= 1e-9);
        }
        assert!((r.objective_flow_mw - r.pre_attack_flow_mw.abs()).abs() <= 1e-9);
        let k = case.line_position(spec.target_line).unwrap();
        assert!((r.overload_mw - (r.pre_attack_flow_mw.abs() - case.lines[k].rating_mw).max(0.0)).abs() <= 1e-9);
    }
}

#[test]
fn objective_grows_with_every_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let tol = |v: f64| 1e-7 * (1.0 + v.abs());
    for _ in 0..40 {
        let (case, input, spec) = common::random_attack_instance(&mut rng);
        if attack_input(&input, &spec, &case).is_err() {
            continue;
        }
        let series = |f: &dyn Fn(f64) -> AttackSpec| -> Vec<f64> {
            (0..=8).map(|i| attack_input(&input, &f(i as f64 / 8.0), &case).unwrap().objective_flow_mw).collect()
        };
        let q = series(&|x| AttackSpec { q0: 40.0 * x, ..spec });
        let s = series(&|x| AttackSpec { s0: 0.6 * x, ..spec });
        let a = series(&|x| AttackSpec { alpha: x, mode: ChannelMode::Limited, ..spec });
        for v in [q, s, a] {
            for w in v.windows(2) {
                assert!(w[1] >= w[0] - tol(w[0]), "{v:?}");
            }
        }
    }
}

#[test]
fn shipped_attacks_keep_dc_consistency() {
    for level in DemandLevel::SHIPPED {
        let (case, base) = common::shipped_baseline(level);
        for target in [10, 23, 28] {
            for mode in [ChannelMode::Limited, ChannelMode::Unlimited] {
                let r = run_attack(&base, &AttackSpec::new(target, mode), &case).unwrap();
                let recomputed = compute_dc_flows(&case, &r.attacked_angles).unwrap();
                for (a, b) in recomputed.iter().zip(&r.attacked_flows) {
                    assert!((a - b).abs() <= 1e-9, "{level} line {target} {mode}: {a} vs {b}");
                }
                assert!(r.objective_flow_mw >= r.pre_attack_flow_mw.abs() - 1e-9);
            }
        }
    }
}

#[test]
fn congested_line_is_overloaded_on_high_demand() {
    let (case, base) = common::shipped_baseline(DemandLevel::High);
    let limited = run_attack(&base, &AttackSpec::new(23, ChannelMode::Limited), &case).unwrap();
    let unlimited = run_attack(&base, &AttackSpec::new(23, ChannelMode::Unlimited), &case).unwrap();
    assert!((limited.loading_rate_pre - 1.0).abs() < 1e-9);
    assert!(limited.overload_mw > 0.0);
    assert!(unlimited.overload_mw >= limited.overload_mw);
    // Line 10 moves but stays within its rating even at alpha = 1.
    let l10 = run_attack(&base, &AttackSpec { alpha: 1.0, ..AttackSpec::new(10, ChannelMode::Limited) }, &case).unwrap();
    assert!(l10.objective_flow_mw > l10.pre_attack_flow_mw.abs());
    assert_eq!(l10.overload_mw, 0.0);
}

#[test]
fn attack_needs_sced_dr_dispatch() {
    let (c, _) = common::shipped();
    let s = gridraid_core::grid_model::shipped::rts24_scenario(DemandLevel::High);
    let p = gridraid_core::dispatch::DispatchProblem::new(&c.grid, &s, gridraid_core::dispatch::DispatchMode::Sced);
    let sol = gridraid_core::dispatch::solve_window(&p, 0).unwrap();
    let e = run_attack(&sol, &AttackSpec::new(23, ChannelMode::Limited), &c.grid).unwrap_err();
    assert_eq!(e.code(), "attack::mode");
}
