use super::{solve_window, CarryOverLedger, DispatchError, DispatchProblem, DispatchSolution};

/// The implemented (first) interval of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct ImplementedInterval {
    /// Zero-based interval index in the scenario.
    pub interval: usize,
    pub p_g: Vec<f64>,
    pub theta: Vec<f64>,
    pub flow: Vec<f64>,
    pub dr15: Vec<f64>,
    pub dr30: Vec<f64>,
    pub dr45: Vec<f64>,
    pub demand: Vec<f64>,
    pub carry_in: Vec<f64>,
    pub net_demand: Vec<f64>,
    pub cost_usd: f64,
}

impl DispatchSolution {
    pub fn first_interval(&self) -> ImplementedInterval {
        let col = |m: &[Vec<f64>]| DispatchSolution::column(m, 0);
        ImplementedInterval {
            interval: self.window_start,
            p_g: col(&self.p_gt),
            theta: col(&self.theta_nt),
            flow: col(&self.flow_kt),
            dr15: col(&self.dr15),
            dr30: col(&self.dr30),
            dr45: col(&self.dr45),
            demand: col(&self.demand_nt),
            carry_in: col(&self.carry_in_nt),
            net_demand: col(&self.net_demand_nt),
            cost_usd: self.interval_cost_usd[0],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollResult {
    /// Full window solutions, one per window, in order.
    pub windows: Vec<DispatchSolution>,
    /// Shifts implemented but not yet arrived after the last window.
    pub ledger: CarryOverLedger,
}

impl RollResult {
    pub fn implemented(&self) -> Vec<ImplementedInterval> {
        self.windows.iter().map(DispatchSolution::first_interval).collect()
    }

    pub fn total_cost_usd(&self) -> f64 {
        self.windows.iter().map(|w| w.interval_cost_usd[0]).sum()
    }

    /// System net demand served per implemented interval.
    pub fn net_demand_series(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.net_demand_nt.iter().map(|r| r[0]).sum()).collect()
    }

    pub fn forecast_series(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.demand_nt.iter().map(|r| r[0]).sum()).collect()
    }
}

/// Rolls `n_windows` windows starting at interval 0, implementing only the
/// first interval of each and carrying its outbound shifts forward.
pub fn roll(problem: &DispatchProblem<'_>, n_windows: usize) -> Result<RollResult, DispatchError> {
    let mut ledger = problem.carry_in.clone();
    let mut windows = Vec::with_capacity(n_windows);
    for w in 0..n_windows {
        let p = DispatchProblem {
            carry_in: ledger.clone(),
            ..problem.clone()
        };
        let sol = solve_window(&p, w)?;
        let first = sol.first_interval();
        ledger = ledger.advance(&first.dr15, &first.dr30, &first.dr45);
        windows.push(sol);
    }
    Ok(RollResult { windows, ledger })
}

/// System net demand per interval of a window.
pub fn extract_net_demand(sol: &DispatchSolution) -> Vec<f64> {
    (0..sol.horizon)
        .map(|t| sol.net_demand_nt.iter().map(|r| r[t]).sum())
        .collect()
}
