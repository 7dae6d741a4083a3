#![allow(dead_code)]

use gridraid_core::lp::{LinearProgram, Relation, Sense};
use rand::Rng;

/// Random LP within the oracle's default limits: integer coefficients keep
/// statuses well separated from tolerance boundaries.
pub fn random_lp<R: Rng>(rng: &mut R) -> LinearProgram {
    let n = rng.gen_range(1..=8);
    let m = rng.gen_range(1..=12);
    let sense = if rng.gen_bool(0.5) { Sense::Minimize } else { Sense::Maximize };
    let mut lp = LinearProgram::new(sense);
    let vars: Vec<_> = (0..n)
        .map(|j| {
            let (lo, hi) = match rng.gen_range(0..6) {
                0 => (f64::NEG_INFINITY, f64::INFINITY),
                1 => (f64::NEG_INFINITY, rng.gen_range(-3..=6) as f64),
                2 => {
                    let lo = rng.gen_range(-4..=2) as f64;
                    (lo, lo + rng.gen_range(0..=6) as f64)
                }
                _ => (0.0, f64::INFINITY),
            };
            lp.add_var(format!("x{j}"), lo, hi)
        })
        .collect();
    for i in 0..m {
        let mut terms = Vec::new();
        for &v in &vars {
            if rng.gen_bool(0.6) {
                let a = rng.gen_range(-5..=5);
                if a != 0 {
                    terms.push((v, a as f64));
                }
            }
        }
        let rel = match rng.gen_range(0..10) {
            0 => Relation::Eq,
            1..=3 => Relation::Ge,
            _ => Relation::Le,
        };
        let rhs = rng.gen_range(-6..=12) as f64;
        lp.add_constraint(format!("r{i}"), terms, rel, rhs);
    }
    for &v in &vars {
        let c = rng.gen_range(-4..=4);
        if c != 0 {
            lp.add_objective_term(v, c as f64);
        }
    }
    lp
}

pub fn objectives_agree(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    (a - b).abs() <= 1e-6 * (1.0 + b.abs())
}

use gridraid_core::attack::{AttackInput, AttackSpec, ChannelMode};
use gridraid_core::dispatch::{solve_window, DispatchMode, DispatchProblem, DispatchSolution, DrCostConfig};
use gridraid_core::grid_model::shipped::{rts24, rts24_scenario};
use gridraid_core::grid_model::{compute_dc_flows, Bus, CaseFile, DemandLevel, Generator, GridCase, Line};

/// Shipped case with its PARAMS DR costs.
pub fn shipped() -> (CaseFile, DrCostConfig) {
    let c = rts24();
    let costs = DrCostConfig::from_array(c.dr_costs.unwrap()).unwrap();
    (c, costs)
}

/// First SCED-DR window of a shipped scenario.
pub fn shipped_baseline(level: DemandLevel) -> (GridCase, DispatchSolution) {
    let (c, costs) = shipped();
    let s = rts24_scenario(level);
    let sol = solve_window(&DispatchProblem::new(&c.grid, &s, DispatchMode::ScedDr).with_dr_costs(costs), 0).unwrap();
    (c.grid, sol)
}

/// Random balanced 3-bus attack instance: a triangle or a path (sometimes
/// with a parallel line), fixed generation matching served load, and angles
/// from the DC equations with bus 1 as reference.
pub fn random_attack_instance<R: Rng>(rng: &mut R) -> (GridCase, AttackInput, AttackSpec) {
    let mut pairs = vec![(1, 2), (2, 3)];
    if rng.gen_bool(0.6) {
        pairs.push((1, 3));
    }
    if rng.gen_bool(0.3) {
        pairs.push((1, 2));
    }
    let lines: Vec<Line> = pairs
        .iter()
        .enumerate()
        .map(|(k, &(f, t))| {
            let (f, t) = if rng.gen_bool(0.5) { (f, t) } else { (t, f) };
            Line {
                id: k + 1,
                from_bus: f,
                to_bus: t,
                susceptance_mw_per_rad: rng.gen_range(20.0..500.0),
                rating_mw: rng.gen_range(10.0..200.0),
            }
        })
        .collect();
    let demand: Vec<f64> = (0..3).map(|_| if rng.gen_bool(0.8) { rng.gen_range(0.0..120.0) } else { 0.0 }).collect();
    let sched: Vec<f64> = demand.iter().map(|d| if rng.gen_bool(0.7) { rng.gen_range(0.0..0.3) * d } else { 0.0 }).collect();
    let served: Vec<f64> = demand.iter().zip(&sched).map(|(d, s)| d - s).collect();
    let total: f64 = served.iter().sum();
    let gen_buses: Vec<usize> = (1..=3).filter(|_| rng.gen_bool(0.6)).collect();
    let gen_buses = if gen_buses.is_empty() { vec![rng.gen_range(1..=3)] } else { gen_buses };
    let weights: Vec<f64> = gen_buses.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    let generators: Vec<Generator> = gen_buses
        .iter()
        .enumerate()
        .map(|(i, &b)| Generator { id: i + 1, bus: b, p_min_mw: 0.0, p_max_mw: 1000.0, cost_per_mwh: 1.0, committed: true })
        .collect();
    let p: Vec<f64> = weights.iter().map(|w| total * w / wsum).collect();
    let case = GridCase {
        name: "random3".into(),
        buses: (1..=3).map(|id| Bus { id, is_slack: id == 1 }).collect(),
        lines,
        generators,
    };
    // Net injection per bus, then the reduced 2x2 DC system for buses 2, 3.
    let mut inj: Vec<f64> = served.iter().map(|s| -s).collect();
    for (g, &pg) in case.generators.iter().zip(&p) {
        inj[g.bus - 1] += pg;
    }
    let mut lap = [[0.0f64; 3]; 3];
    for l in &case.lines {
        let (f, t, b) = (l.from_bus - 1, l.to_bus - 1, l.susceptance_mw_per_rad);
        lap[f][f] += b;
        lap[t][t] += b;
        lap[f][t] -= b;
        lap[t][f] -= b;
    }
    let (a, b, c, d) = (lap[1][1], lap[1][2], lap[2][1], lap[2][2]);
    let det = a * d - b * c;
    let th2 = (d * inj[1] - b * inj[2]) / det;
    let th3 = (a * inj[2] - c * inj[1]) / det;
    let angles = vec![0.0, th2, th3];
    let input = AttackInput {
        fixed_generation: p,
        fixed_angles: angles.clone(),
        scheduled_dr15: sched.clone(),
        scheduled_dr30: vec![0.0; 3],
        scheduled_dr45: vec![0.0; 3],
        demand_first: demand.clone(),
        dr_max: demand.iter().map(|d| 0.3 * d).collect(),
    };
    let flows = compute_dc_flows(&case, &angles).unwrap();
    let candidates: Vec<usize> = case.lines.iter().zip(&flows).filter(|(_, f)| f.abs() > 1e-3).map(|(l, _)| l.id).collect();
    let target = if candidates.is_empty() { 1 } else { candidates[rng.gen_range(0..candidates.len())] };
    let spec = AttackSpec {
        target_line: target,
        alpha: rng.gen_range(0.0..=1.0),
        s0: rng.gen_range(0.0..0.6),
        q0: rng.gen_range(0.0..40.0),
        mode: if rng.gen_bool(0.5) { ChannelMode::Limited } else { ChannelMode::Unlimited },
    };
    (case, input, spec)
}
