//! The attack LP written without auxiliaries: flows substituted as
//! `b (θ~_f − θ~_t)` and each l1 budget expanded into one row per sign
//! pattern. Exponential in the bus count, so only for cross-checking the
//! linearized model on tiny cases.

use super::{target_sign, AttackError, AttackInput, AttackSpec};
use crate::grid_model::GridCase;
use crate::lp::{LinearProgram, Relation, Sense};

pub const DIRECT_MAX_BUSES: usize = 10;

/// Variables are `θ~` for each bus position, then `DR~` for each bus position.
pub fn build_fsmi_direct(input: &AttackInput, spec: &AttackSpec, case: &GridCase) -> Result<LinearProgram, AttackError> {
    spec.check(case)?;
    input.check(case)?;
    let nb = case.buses.len();
    if nb > DIRECT_MAX_BUSES {
        return Err(AttackError::DirectTooLarge(nb));
    }
    let (k, sign) = target_sign(input, spec, case)?;
    let pos = case.bus_positions();
    let dr = input.scheduled_dr();
    let mut lp = LinearProgram::new(Sense::Maximize);
    let theta: Vec<_> = case.buses.iter().map(|b| lp.add_free_var(format!("theta_b{}", b.id))).collect();
    let fdr: Vec<_> = case
        .buses
        .iter()
        .zip(input.false_dr_bounds(spec))
        .map(|(b, (lo, hi))| lp.add_var(format!("fdr_b{}", b.id), lo, hi))
        .collect();

    let target = &case.lines[k];
    let b = target.susceptance_mw_per_rad;
    lp.add_objective_term(theta[pos[&target.from_bus]], sign * b);
    lp.add_objective_term(theta[pos[&target.to_bus]], -sign * b);

    let mut lap = vec![vec![0.0; nb]; nb];
    for l in &case.lines {
        let (f, t, b) = (pos[&l.from_bus], pos[&l.to_bus], l.susceptance_mw_per_rad);
        // inflow − outflow at f is −b (θf − θt); at t it is +b (θf − θt).
        lap[f][f] -= b;
        lap[f][t] += b;
        lap[t][f] += b;
        lap[t][t] -= b;
    }
    let mut gen_at = vec![0.0; nb];
    for (g, &p) in case.committed_generators().zip(&input.fixed_generation) {
        gen_at[pos[&g.bus]] += p;
    }
    for n in 0..nb {
        let mut row: Vec<_> = (0..nb).filter(|&m| lap[n][m] != 0.0).map(|m| (theta[m], lap[n][m])).collect();
        row.push((fdr[n], 1.0));
        lp.add_constraint(format!("balance_b{}", case.buses[n].id), row, Relation::Eq, input.demand_first[n] - gen_at[n]);
    }

    // Σ σ_n (x*_n − x~_n) ≤ budget for every σ ∈ {±1}^n.
    let mut budget = |name: &str, vars: &[crate::lp::VarId], center: &[f64], cap: f64| {
        for mask in 0..(1u32 << nb) {
            let sig = |n: usize| if mask & (1 << n) != 0 { -1.0 } else { 1.0 };
            let row = (0..nb).map(|n| (vars[n], -sig(n))).collect();
            let rhs = cap - (0..nb).map(|n| sig(n) * center[n]).sum::<f64>();
            lp.add_constraint(format!("{name}_{mask}"), row, Relation::Le, rhs);
        }
    };
    budget("angle_budget", &theta, &input.fixed_angles, spec.s0);
    budget("dr_budget", &fdr, &dr, spec.q0);
    Ok(lp)
}
