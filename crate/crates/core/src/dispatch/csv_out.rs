//! Dispatch results as CSV.
//!
//! One row per (window, interval, entity). `kind` is `gen`, `line`,
//! `bus-dr` or `system`; columns that do not apply to a kind are empty.
//!
//! | column        | gen        | line          | bus-dr            | system           |
//! |---------------|------------|---------------|-------------------|------------------|
//! | mw            | output     | flow          | forecast demand   | total generation |
//! | theta_rad     |            |               | angle             |                  |
//! | rating_mw     |            | rating        |                   |                  |
//! | loading       |            | abs(flow)/rating |                |                  |
//! | dr15/30/45_mw |            |               | deferred out at t | system totals    |
//! | carry_in_mw   |            |               | ledger arrivals   | system total     |
//! | net_demand_mw |            |               | served demand     | system total     |
//! | cost_usd      | cost       |               |                   | interval cost    |
//!
//! `window` and `interval` are 1-based; `interval` counts from the start of
//! the scenario.

use super::DispatchSolution;
use crate::grid_model::GridCase;

pub const DISPATCH_CSV_HEADER: [&str; 14] = [
    "window",
    "interval",
    "kind",
    "id",
    "mw",
    "theta_rad",
    "rating_mw",
    "loading",
    "dr15_mw",
    "dr30_mw",
    "dr45_mw",
    "carry_in_mw",
    "net_demand_mw",
    "cost_usd",
];

pub(crate) fn num(v: f64) -> String {
    let v = if v.abs() < 5e-13 { 0.0 } else { v };
    format!("{v:.6}")
}

pub fn dispatch_csv(case: &GridCase, windows: &[DispatchSolution]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(DISPATCH_CSV_HEADER).expect("in-memory write");
    let gens: Vec<_> = case.committed_generators().collect();
    let e = String::new;
    for (wi, sol) in windows.iter().enumerate() {
        let window = (wi + 1).to_string();
        for t in 0..sol.horizon {
            let interval = (sol.window_start + t + 1).to_string();
            let mut row = |rec: [String; 12]| {
                let mut full = vec![window.clone(), interval.clone()];
                full.extend(rec);
                w.write_record(&full).expect("in-memory write");
            };
            for (gi, g) in gens.iter().enumerate() {
                let p = sol.p_gt[gi][t];
                row(["gen".into(), g.id.to_string(), num(p), e(), e(), e(), e(), e(), e(), e(), e(), num(p * g.cost_per_mwh)]);
            }
            for (k, l) in case.lines.iter().enumerate() {
                let f = sol.flow_kt[k][t];
                row([
                    "line".into(),
                    l.id.to_string(),
                    num(f),
                    e(),
                    num(l.rating_mw),
                    num(f.abs() / l.rating_mw),
                    e(), e(), e(), e(), e(), e(),
                ]);
            }
            for (n, b) in case.buses.iter().enumerate() {
                row([
                    "bus-dr".into(),
                    b.id.to_string(),
                    num(sol.demand_nt[n][t]),
                    num(sol.theta_nt[n][t]),
                    e(),
                    e(),
                    num(sol.dr15[n][t]),
                    num(sol.dr30[n][t]),
                    num(sol.dr45[n][t]),
                    num(sol.carry_in_nt[n][t]),
                    num(sol.net_demand_nt[n][t]),
                    e(),
                ]);
            }
            let sum = |m: &[Vec<f64>]| m.iter().map(|r| r[t]).sum::<f64>();
            row([
                "system".into(),
                "0".into(),
                num(sum(&sol.p_gt)),
                e(),
                e(),
                e(),
                num(sum(&sol.dr15)),
                num(sum(&sol.dr30)),
                num(sum(&sol.dr45)),
                num(sum(&sol.carry_in_nt)),
                num(sum(&sol.net_demand_nt)),
                num(sol.interval_cost_usd[t]),
            ]);
        }
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}
