//! Plain-text case files.
//!
//! ```text
//! # comment
//! SECTION BUS      id slack(0|1)
//! SECTION LINE     id from to susceptance_mw_per_rad rating_mw
//! SECTION GEN      id bus p_min p_max cost_per_mwh committed(0|1)
//! SECTION LOAD     bus d_1 d_2 ... d_T
//! SECTION PARAMS   key value
//! ```
//!
//! Sections may appear in any order. BUS, LINE and GEN are required for a
//! case; a scenario file needs only LOAD (and optionally PARAMS).

use super::{
    Bus, CaseFile, DemandLevel, DemandScenario, GridCase, GridError, Generator, Line,
    DEFAULT_DR_FRACTION, DEFAULT_INTERVAL_MINUTES,
};
use std::collections::{BTreeMap, HashSet};
use std::fmt::Write;

const SECTIONS: [&str; 5] = ["BUS", "LINE", "GEN", "LOAD", "PARAMS"];

struct Section<'a> {
    rows: Vec<(usize, Vec<&'a str>)>,
}

fn split_sections(text: &str) -> Result<BTreeMap<&'static str, Section<'_>>, GridError> {
    let mut sections: BTreeMap<&'static str, Section<'_>> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (i, raw) in text.split('\n').enumerate() {
        let lineno = i + 1;
        let raw = raw.strip_suffix('\r').unwrap_or(raw);
        if !raw.is_ascii() {
            return Err(GridError::Syntax {
                line: lineno,
                message: "non-ASCII character".to_string(),
            });
        }
        let content = raw.split('#').next().unwrap_or("");
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields[0] == "SECTION" {
            if fields.len() != 2 {
                return Err(GridError::Syntax {
                    line: lineno,
                    message: "expected `SECTION <name>`".to_string(),
                });
            }
            let Some(&name) = SECTIONS.iter().find(|&&s| s == fields[1]) else {
                return Err(GridError::UnknownSection {
                    name: fields[1].to_string(),
                    line: lineno,
                });
            };
            if sections.contains_key(name) {
                return Err(GridError::Syntax {
                    line: lineno,
                    message: format!("section {name} appears twice"),
                });
            }
            sections.insert(name, Section { rows: Vec::new() });
            current = Some(name);
            continue;
        }
        let Some(name) = current else {
            return Err(GridError::Syntax {
                line: lineno,
                message: "data before the first SECTION header".to_string(),
            });
        };
        sections.get_mut(name).unwrap().rows.push((lineno, fields));
    }
    Ok(sections)
}

fn expect_fields(line: usize, fields: &[&str], n: usize, section: &str) -> Result<(), GridError> {
    if fields.len() != n {
        return Err(GridError::Syntax {
            line,
            message: format!("{section} row needs {n} fields, found {}", fields.len()),
        });
    }
    Ok(())
}

fn int(line: usize, s: &str) -> Result<usize, GridError> {
    s.parse().map_err(|_| GridError::Syntax {
        line,
        message: format!("expected a non-negative integer, found `{s}`"),
    })
}

fn num(line: usize, s: &str) -> Result<f64, GridError> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(GridError::Syntax {
            line,
            message: format!("expected a decimal number, found `{s}`"),
        }),
    }
}

fn flag(line: usize, s: &str) -> Result<bool, GridError> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(GridError::Syntax {
            line,
            message: format!("expected 0 or 1, found `{s}`"),
        }),
    }
}

fn check_unique(seen: &mut HashSet<usize>, section: &'static str, id: usize, line: usize) -> Result<(), GridError> {
    if !seen.insert(id) {
        return Err(GridError::DuplicateId { section, id, line });
    }
    Ok(())
}

#[derive(Default)]
struct Params {
    case_name: Option<String>,
    dr_fraction: Option<f64>,
    interval_minutes: Option<f64>,
    label: Option<DemandLevel>,
    dr_costs: [Option<f64>; 3],
    first_scenario_key_line: Option<usize>,
}

fn parse_params(section: Option<&Section<'_>>) -> Result<Params, GridError> {
    let mut p = Params::default();
    let Some(section) = section else {
        return Ok(p);
    };
    let mut seen = HashSet::new();
    for (line, fields) in &section.rows {
        let line = *line;
        expect_fields(line, fields, 2, "PARAMS")?;
        let (key, value) = (fields[0], fields[1]);
        if !seen.insert(key) {
            return Err(GridError::Syntax {
                line,
                message: format!("parameter {key} given twice"),
            });
        }
        let mut scenario_key = true;
        match key {
            "dr_fraction" => p.dr_fraction = Some(num(line, value)?),
            "interval_minutes" => p.interval_minutes = Some(num(line, value)?),
            "scenario_label" => {
                p.label = Some(value.parse().map_err(|message| GridError::Syntax { line, message })?)
            }
            "case_name" => {
                scenario_key = false;
                p.case_name = Some(value.to_string());
            }
            "dr_cost_15" | "dr_cost_30" | "dr_cost_45" => {
                scenario_key = false;
                let k = match key {
                    "dr_cost_15" => 0,
                    "dr_cost_30" => 1,
                    _ => 2,
                };
                p.dr_costs[k] = Some(num(line, value)?);
            }
            _ => {
                return Err(GridError::UnknownParameter {
                    key: key.to_string(),
                    line,
                })
            }
        }
        if scenario_key && p.first_scenario_key_line.is_none() {
            p.first_scenario_key_line = Some(line);
        }
    }
    Ok(p)
}

fn parse_load(section: &Section<'_>, params: &Params) -> Result<DemandScenario, GridError> {
    let mut demand = BTreeMap::new();
    let mut width = None;
    for (line, fields) in &section.rows {
        let line = *line;
        if fields.len() < 2 {
            return Err(GridError::Syntax {
                line,
                message: "LOAD row needs a bus id and at least one interval".to_string(),
            });
        }
        let bus = int(line, fields[0])?;
        let series = fields[1..]
            .iter()
            .map(|s| num(line, s))
            .collect::<Result<Vec<_>, _>>()?;
        match width {
            None => width = Some(series.len()),
            Some(w) if w != series.len() => {
                return Err(GridError::Syntax {
                    line,
                    message: format!("LOAD row has {} intervals, expected {w}", series.len()),
                })
            }
            _ => {}
        }
        if demand.insert(bus, series).is_some() {
            return Err(GridError::DuplicateId {
                section: "LOAD",
                id: bus,
                line,
            });
        }
    }
    Ok(DemandScenario {
        demand_mw: demand,
        dr_fraction: params.dr_fraction.unwrap_or(DEFAULT_DR_FRACTION),
        interval_minutes: params.interval_minutes.unwrap_or(DEFAULT_INTERVAL_MINUTES),
        label: params.label.unwrap_or(DemandLevel::Custom),
    })
}

fn dr_costs(params: &Params) -> Option<[f64; 3]> {
    let [a, b, c] = params.dr_costs;
    if a.is_none() && b.is_none() && c.is_none() {
        return None;
    }
    let d = crate::dispatch::DrCostConfig::default();
    Some([
        a.unwrap_or(d.cost_15),
        b.unwrap_or(d.cost_30),
        c.unwrap_or(d.cost_45),
    ])
}

fn scenario_from(sections: &BTreeMap<&'static str, Section<'_>>, params: &Params) -> Result<Option<DemandScenario>, GridError> {
    match sections.get("LOAD") {
        Some(load) => Ok(Some(parse_load(load, params)?)),
        None => {
            if let Some(line) = params.first_scenario_key_line {
                return Err(GridError::Syntax {
                    line,
                    message: "scenario parameter given without a LOAD section".to_string(),
                });
            }
            Ok(None)
        }
    }
}

/// Parses a complete case file.
pub fn parse_case(text: &str) -> Result<CaseFile, GridError> {
    let sections = split_sections(text)?;
    for required in ["BUS", "LINE", "GEN"] {
        if !sections.contains_key(required) {
            return Err(GridError::MissingSection(required));
        }
    }

    let mut seen = HashSet::new();
    let mut buses = Vec::new();
    for (line, f) in &sections["BUS"].rows {
        expect_fields(*line, f, 2, "BUS")?;
        let id = int(*line, f[0])?;
        check_unique(&mut seen, "BUS", id, *line)?;
        buses.push(Bus {
            id,
            is_slack: flag(*line, f[1])?,
        });
    }
    let bus_ids = seen;
    let known = |bus: usize, context: String| -> Result<usize, GridError> {
        if bus_ids.contains(&bus) {
            Ok(bus)
        } else {
            Err(GridError::DanglingBus { context, bus })
        }
    };

    let mut seen = HashSet::new();
    let mut lines = Vec::new();
    for (line, f) in &sections["LINE"].rows {
        expect_fields(*line, f, 5, "LINE")?;
        let id = int(*line, f[0])?;
        check_unique(&mut seen, "LINE", id, *line)?;
        lines.push(Line {
            id,
            from_bus: known(int(*line, f[1])?, format!("LINE {id}"))?,
            to_bus: known(int(*line, f[2])?, format!("LINE {id}"))?,
            susceptance_mw_per_rad: num(*line, f[3])?,
            rating_mw: num(*line, f[4])?,
        });
    }

    let mut seen = HashSet::new();
    let mut generators = Vec::new();
    for (line, f) in &sections["GEN"].rows {
        expect_fields(*line, f, 6, "GEN")?;
        let id = int(*line, f[0])?;
        check_unique(&mut seen, "GEN", id, *line)?;
        generators.push(Generator {
            id,
            bus: known(int(*line, f[1])?, format!("GEN {id}"))?,
            p_min_mw: num(*line, f[2])?,
            p_max_mw: num(*line, f[3])?,
            cost_per_mwh: num(*line, f[4])?,
            committed: flag(*line, f[5])?,
        });
    }

    let params = parse_params(sections.get("PARAMS"))?;
    let scenario = scenario_from(&sections, &params)?;
    if let Some(s) = &scenario {
        for &bus in s.demand_mw.keys() {
            known(bus, "LOAD".to_string())?;
        }
    }
    Ok(CaseFile {
        grid: GridCase {
            name: params.case_name.clone().unwrap_or_else(|| "unnamed".to_string()),
            buses,
            lines,
            generators,
        },
        scenario,
        dr_costs: dr_costs(&params),
    })
}

/// Parses a scenario file (LOAD plus optional PARAMS). Grid sections, if
/// present, are ignored.
pub fn parse_scenario(text: &str) -> Result<DemandScenario, GridError> {
    let sections = split_sections(text)?;
    let params = parse_params(sections.get("PARAMS"))?;
    scenario_from(&sections, &params)?.ok_or(GridError::MissingSection("LOAD"))
}

/// Writes a case file that [`parse_case`] reads back to an equal value.
pub fn serialize_case(case: &CaseFile) -> String {
    let mut out = String::new();
    let g = &case.grid;
    out.push_str("SECTION BUS\n");
    for b in &g.buses {
        let _ = writeln!(out, "{} {}", b.id, u8::from(b.is_slack));
    }
    out.push_str("\nSECTION LINE\n");
    for l in &g.lines {
        let _ = writeln!(
            out,
            "{} {} {} {} {}",
            l.id, l.from_bus, l.to_bus, l.susceptance_mw_per_rad, l.rating_mw
        );
    }
    out.push_str("\nSECTION GEN\n");
    for gen in &g.generators {
        let _ = writeln!(
            out,
            "{} {} {} {} {} {}",
            gen.id,
            gen.bus,
            gen.p_min_mw,
            gen.p_max_mw,
            gen.cost_per_mwh,
            u8::from(gen.committed)
        );
    }
    if let Some(s) = &case.scenario {
        out.push_str("\nSECTION LOAD\n");
        for (bus, series) in &s.demand_mw {
            let _ = write!(out, "{bus}");
            for v in series {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
    }
    out.push_str("\nSECTION PARAMS\n");
    let _ = writeln!(out, "case_name {}", g.name);
    if let Some(s) = &case.scenario {
        let _ = writeln!(out, "dr_fraction {}", s.dr_fraction);
        let _ = writeln!(out, "interval_minutes {}", s.interval_minutes);
        let _ = writeln!(out, "scenario_label {}", s.label);
    }
    if let Some([a, b, c]) = case.dr_costs {
        let _ = writeln!(out, "dr_cost_15 {a}\ndr_cost_30 {b}\ndr_cost_45 {c}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "\
# two buses
SECTION BUS
1 1
2 0
SECTION LINE
1 1 2 100 200
SECTION GEN
1 1 0 100 10 1
2 2 0 100 50 1
";

    #[test]
    fn minimal_case() {
        let c = parse_case(MINIMAL).unwrap();
        assert_eq!(c.grid.buses.len(), 2);
        assert_eq!(c.grid.lines.len(), 1);
        assert_eq!(c.grid.generators.len(), 2);
        assert!(c.scenario.is_none());
        assert_eq!(c.grid.lines[0].susceptance_mw_per_rad, 100.0);
    }

    #[test]
    fn crlf_and_section_order() {
        let text = "SECTION GEN\r\n1 2 0 10 1 1\r\nSECTION LINE\r\n1 1 2 5 5\r\nSECTION BUS\r\n1 1\r\n2 0\r\n";
        let c = parse_case(text).unwrap();
        assert_eq!(c.grid.generators[0].bus, 2);
    }

    #[test]
    fn dangling_bus_is_named() {
        let text = MINIMAL.replace("1 1 2 100 200", "1 1 99 100 200");
        let err = parse_case(&text).unwrap_err();
        assert_eq!(
            err,
            GridError::DanglingBus {
                context: "LINE 1".to_string(),
                bus: 99
            }
        );
        assert!(err.to_string().contains("99"));
    }

    #[test]
    fn syntax_error_reports_line() {
        let text = MINIMAL.replace("2 2 0 100 50 1", "2 2 0 abc 50 1");
        match parse_case(&text).unwrap_err() {
            GridError::Syntax { line, .. } => assert_eq!(line, 9),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn duplicate_ids() {
        let text = MINIMAL.replace("2 0\n", "1 0\n");
        assert!(matches!(
            parse_case(&text),
            Err(GridError::DuplicateId { section: "BUS", id: 1, .. })
        ));
    }

    #[test]
    fn unknown_and_missing_sections() {
        let text = format!("{MINIMAL}SECTION SHUNT\n1 2\n");
        assert!(matches!(parse_case(&text), Err(GridError::UnknownSection { .. })));
        let text = MINIMAL.replace("SECTION GEN", "#").replace("1 1 0 100 10 1\n2 2 0 100 50 1\n", "");
        assert_eq!(parse_case(&text), Err(GridError::MissingSection("GEN")));
    }

    #[test]
    fn unknown_parameter() {
        let text = format!("{MINIMAL}SECTION PARAMS\nfoo 1\n");
        assert!(matches!(parse_case(&text), Err(GridError::UnknownParameter { .. })));
    }

    #[test]
    fn load_and_params() {
        let text = format!(
            "{MINIMAL}SECTION LOAD\n2 80 40 40 40\nSECTION PARAMS\ndr_fraction 0.25\nscenario_label high\ndr_cost_30 5\n"
        );
        let c = parse_case(&text).unwrap();
        let s = c.scenario.unwrap();
        assert_eq!(s.intervals(), 4);
        assert_eq!(s.demand(2, 0), 80.0);
        assert_eq!(s.demand(1, 0), 0.0);
        assert_eq!(s.dr_fraction, 0.25);
        assert_eq!(s.label, DemandLevel::High);
        assert_eq!(c.dr_costs, Some([1.0, 5.0, 3.0]));
    }

    #[test]
    fn ragged_load_rejected() {
        let text = format!("{MINIMAL}SECTION LOAD\n1 1 2 3\n2 1 2\n");
        assert!(matches!(parse_case(&text), Err(GridError::Syntax { .. })));
    }

    #[test]
    fn load_on_unknown_bus() {
        let text = format!("{MINIMAL}SECTION LOAD\n7 1 2 3\n");
        assert!(matches!(parse_case(&text), Err(GridError::DanglingBus { bus: 7, .. })));
    }

    #[test]
    fn scenario_file_alone() {
        let s = parse_scenario("SECTION LOAD\n3 1.5 2.5\nSECTION PARAMS\ninterval_minutes 5\n").unwrap();
        assert_eq!(s.system_totals(), vec![1.5, 2.5]);
        assert_eq!(s.interval_minutes, 5.0);
        assert_eq!(parse_scenario("SECTION PARAMS\n"), Err(GridError::MissingSection("LOAD")));
    }

    #[test]
    fn round_trip_minimal() {
        let c = parse_case(MINIMAL).unwrap();
        assert_eq!(parse_case(&serialize_case(&c)).unwrap(), c);
    }
}
