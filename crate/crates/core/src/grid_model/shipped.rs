//! The IEEE RTS 24-bus case and its three demand scenarios, embedded at
//! compile time.

use super::{parse_case, parse_scenario, CaseFile, DemandLevel, DemandScenario};

pub const RTS24_CASE: &str = include_str!("../../data/rts24.case");
pub const RTS24_LOW: &str = include_str!("../../data/rts24_low.load");
pub const RTS24_MEDIUM: &str = include_str!("../../data/rts24_medium.load");
pub const RTS24_HIGH: &str = include_str!("../../data/rts24_high.load");

/// Congested line named in the shipped studies (buses 14-16).
pub const RTS24_TARGET_LINE: usize = 23;

pub fn rts24() -> CaseFile {
    parse_case(RTS24_CASE).expect("embedded rts24 case parses")
}

pub fn rts24_scenario(level: DemandLevel) -> DemandScenario {
    let text = match level {
        DemandLevel::Low => RTS24_LOW,
        DemandLevel::Medium => RTS24_MEDIUM,
        DemandLevel::High | DemandLevel::Custom => RTS24_HIGH,
    };
    parse_scenario(text).expect("embedded scenario parses")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_model::{validate_with_scenario, DemandLevel};

    #[test]
    fn shipped_case_is_valid() {
        let c = rts24();
        let r = validate_with_scenario(&c.grid, c.scenario.as_ref().unwrap());
        assert!(r.is_valid(), "{r}");
        assert_eq!((r.bus_count, r.line_count, r.generator_count), (24, 38, 33));
        assert!((r.committed_capacity_mw - 2792.0).abs() < 1e-9);
        assert!((r.peak_load_mw.unwrap() - 2281.0).abs() < 1e-9);
    }

    #[test]
    fn scenarios_match_labels() {
        for level in DemandLevel::SHIPPED {
            let s = rts24_scenario(level);
            assert_eq!(s.label, level);
            assert_eq!(s.intervals(), 7);
        }
        assert_eq!(rts24().scenario.unwrap(), rts24_scenario(DemandLevel::High));
    }
}
