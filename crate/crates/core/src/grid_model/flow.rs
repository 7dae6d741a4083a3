use super::{GridCase, GridError};

/// Line flows `b_k (θ_from − θ_to)` in MW for angles given per bus position.
///
/// Flows depend only on angle differences, so a nonzero reference angle is
/// accepted.
pub fn compute_dc_flows(case: &GridCase, angles_rad: &[f64]) -> Result<Vec<f64>, GridError> {
    if angles_rad.len() < case.buses.len() {
        return Err(GridError::MissingAngle {
            bus: case.buses[angles_rad.len()].id,
        });
    }
    let pos = case.bus_positions();
    case.lines
        .iter()
        .map(|l| {
            let f = *pos.get(&l.from_bus).ok_or_else(|| GridError::DanglingBus {
                context: format!("LINE {}", l.id),
                bus: l.from_bus,
            })?;
            let t = *pos.get(&l.to_bus).ok_or_else(|| GridError::DanglingBus {
                context: format!("LINE {}", l.id),
                bus: l.to_bus,
            })?;
            Ok(l.susceptance_mw_per_rad * (angles_rad[f] - angles_rad[t]))
        })
        .collect()
}

/// Net injection per bus position implied by line flows: outflow on lines
/// leaving the bus minus inflow on lines arriving at it.
pub fn nodal_injections(case: &GridCase, flows_mw: &[f64]) -> Vec<f64> {
    let pos = case.bus_positions();
    let mut inj = vec![0.0; case.buses.len()];
    for (l, &f) in case.lines.iter().zip(flows_mw) {
        inj[pos[&l.from_bus]] += f;
        inj[pos[&l.to_bus]] -= f;
    }
    inj
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_model::{Bus, Line};
    use proptest::prelude::*;

    fn line(id: usize, from: usize, to: usize, b: f64) -> Line {
        Line {
            id,
            from_bus: from,
            to_bus: to,
            susceptance_mw_per_rad: b,
            rating_mw: 1000.0,
        }
    }

    fn grid(n: usize, lines: Vec<Line>) -> GridCase {
        GridCase {
            name: "t".into(),
            buses: (1..=n).map(|id| Bus { id, is_slack: id == 1 }).collect(),
            lines,
            generators: vec![],
        }
    }

    #[test]
    fn two_bus_substitution() {
        let g = grid(2, vec![line(1, 1, 2, 100.0)]);
        let f = compute_dc_flows(&g, &[0.0, -0.5]).unwrap();
        assert_eq!(f, vec![50.0]);
    }

    #[test]
    fn zero_angles_zero_flows() {
        let g = grid(3, vec![line(1, 1, 2, 10.0), line(2, 2, 3, 20.0)]);
        assert_eq!(compute_dc_flows(&g, &[0.0; 3]).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn missing_angle() {
        let g = grid(3, vec![line(1, 1, 2, 10.0)]);
        assert_eq!(
            compute_dc_flows(&g, &[0.0, 0.1]),
            Err(GridError::MissingAngle { bus: 3 })
        );
    }

    #[test]
    fn triangle_hand_solution() {
        // Equal susceptances b = 100 and withdrawals of 30 MW at bus 2 and
        // 60 MW at bus 3. The reduced system [[2b, -b], [-b, 2b]] θ = (-30, -60)
        // gives θ2 = -0.4, θ3 = -0.5, flows 1→2 = 40, 1→3 = 50, 2→3 = 10.
        let g = grid(3, vec![line(1, 1, 2, 100.0), line(2, 1, 3, 100.0), line(3, 2, 3, 100.0)]);
        let f = compute_dc_flows(&g, &[0.0, -0.4, -0.5]).unwrap();
        let expect = [40.0, 50.0, 10.0];
        for (a, b) in f.iter().zip(expect) {
            assert!((a - b).abs() < 1e-12);
        }
        let inj = nodal_injections(&g, &f);
        for (a, b) in inj.iter().zip([90.0, -30.0, -60.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn injections_sum_to_zero(angles in proptest::collection::vec(-1.0f64..1.0, 4), bs in proptest::collection::vec(1.0f64..500.0, 5)) {
            let g = grid(4, vec![
                line(1, 1, 2, bs[0]), line(2, 2, 3, bs[1]), line(3, 3, 4, bs[2]),
                line(4, 4, 1, bs[3]), line(5, 1, 3, bs[4]),
            ]);
            let mut a = angles.clone();
            a[0] = 0.0;
            let f = compute_dc_flows(&g, &a).unwrap();
            let inj = nodal_injections(&g, &f);
            prop_assert!(inj.iter().sum::<f64>().abs() < 1e-9);
        }

        #[test]
        fn susceptance_angle_bilinearity(theta in -0.5f64..0.5, b in 1.0f64..1000.0, lambda in 0.01f64..100.0) {
            let g1 = grid(2, vec![line(1, 1, 2, b)]);
            let g2 = grid(2, vec![line(1, 1, 2, b * lambda)]);
            let f1 = compute_dc_flows(&g1, &[0.0, theta]).unwrap()[0];
            let f2 = compute_dc_flows(&g2, &[0.0, theta / lambda]).unwrap()[0];
            prop_assert!((f1 - f2).abs() <= 1e-9 * (1.0 + f1.abs()));
        }
    }
}
