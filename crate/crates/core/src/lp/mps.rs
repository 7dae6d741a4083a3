//! Fixed-column MPS export for cross-checking models with external solvers.
//!
//! Names in fixed MPS are limited to eight characters, so rows are written as
//! `R0000001`... and columns as `C0000001`...; a `*` comment block at the top
//! maps each short name back to the model's own name. Maximization problems
//! are written with an `OBJSENSE MAX` section (understood by most readers).

use super::{LinearProgram, Relation, Sense};
use std::fmt::Write;

fn row_name(i: usize) -> String {
    format!("R{:07}", i + 1)
}

fn col_name(j: usize) -> String {
    format!("C{:07}", j + 1)
}

fn num(v: f64) -> String {
    // 12 characters wide fields; `{:e}` keeps full precision compactly.
    let s = format!("{v}");
    if s.len() <= 12 {
        s
    } else {
        format!("{v:.6e}")
    }
}

fn field_line(out: &mut String, code: &str, a: &str, b: &str, c: &str, d: Option<(&str, &str)>) {
    // Columns: 2-3 code, 5-12 name, 15-22 name, 25-36 number, 40-47 name, 50-61 number.
    let mut line = format!(" {code:<2} {a:<8}  {b:<8}  {c:>12}");
    if let Some((e, f)) = d {
        line.push_str(&format!("   {e:<8}  {f:>12}"));
    }
    out.push_str(line.trim_end());
    out.push('\n');
}

pub fn write_mps(lp: &LinearProgram, name: &str) -> String {
    let mut out = String::new();
    for (j, v) in lp.variables.iter().enumerate() {
        let _ = writeln!(out, "* {} {}", col_name(j), v.name);
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        let _ = writeln!(out, "* {} {}", row_name(i), c.name);
    }
    let _ = writeln!(out, "NAME          {}", name.chars().take(8).collect::<String>());
    if lp.sense == Sense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n");
    out.push_str(" N  COST\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        let code = match c.relation {
            Relation::Le => "L",
            Relation::Eq => "E",
            Relation::Ge => "G",
        };
        let _ = writeln!(out, " {code:<2} {}", row_name(i));
    }

    // Column-major coefficient listing.
    let mut by_col: Vec<Vec<(String, f64)>> = vec![Vec::new(); lp.num_vars()];
    for (j, c) in lp.objective_vector().into_iter().enumerate() {
        if c != 0.0 {
            by_col[j].push(("COST".to_string(), c));
        }
    }
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut merged: Vec<(usize, f64)> = Vec::new();
        for &(v, a) in &c.terms {
            match merged.iter_mut().find(|(j, _)| *j == v.0) {
                Some(e) => e.1 += a,
                None => merged.push((v.0, a)),
            }
        }
        for (j, a) in merged {
            if a != 0.0 {
                by_col[j].push((row_name(i), a));
            }
        }
    }
    out.push_str("COLUMNS\n");
    for (j, entries) in by_col.iter().enumerate() {
        let cn = col_name(j);
        if entries.is_empty() {
            field_line(&mut out, "", &cn, "COST", "0", None);
        }
        for pair in entries.chunks(2) {
            let second = pair.get(1).map(|(r, a)| (r.as_str(), num(*a)));
            field_line(
                &mut out,
                "",
                &cn,
                &pair[0].0,
                &num(pair[0].1),
                second.as_ref().map(|(r, a)| (*r, a.as_str())),
            );
        }
    }

    out.push_str("RHS\n");
    for (i, c) in lp.constraints.iter().enumerate() {
        if c.rhs != 0.0 {
            field_line(&mut out, "", "RHS", &row_name(i), &num(c.rhs), None);
        }
    }

    out.push_str("BOUNDS\n");
    for (j, v) in lp.variables.iter().enumerate() {
        let cn = col_name(j);
        match (v.lower.is_finite(), v.upper.is_finite()) {
            (true, true) if v.lower == v.upper => {
                field_line(&mut out, "FX", "BND", &cn, &num(v.lower), None)
            }
            (false, false) => field_line(&mut out, "FR", "BND", &cn, "", None),
            (lo, up) => {
                if !lo {
                    field_line(&mut out, "MI", "BND", &cn, "", None);
                } else if v.lower != 0.0 {
                    field_line(&mut out, "LO", "BND", &cn, &num(v.lower), None);
                }
                if up {
                    field_line(&mut out, "UP", "BND", &cn, &num(v.upper), None);
                }
            }
        }
    }
    out.push_str("ENDATA\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn writes_sections_and_bounds() {
        let mut lp = LinearProgram::new(Sense::Maximize);
        let x = lp.add_var("x", 0.0, f64::INFINITY);
        let y = lp.add_free_var("y");
        let z = lp.add_var("z", 1.5, 1.5);
        lp.add_constraint("cap", vec![(x, 1.0), (y, 2.0)], Relation::Le, 4.0);
        lp.add_constraint("link", vec![(y, 1.0), (z, -1.0)], Relation::Eq, 0.0);
        lp.add_objective_term(x, 3.0);
        let text = write_mps(&lp, "demo");
        assert!(text.contains("* C0000001 x"));
        assert!(text.contains("OBJSENSE\n    MAX"));
        assert!(text.contains(" L  R0000001"));
        assert!(text.contains(" E  R0000002"));
        assert!(text.contains(" FR BND       C0000002"));
        assert!(text.contains(" FX BND       C0000003           1.5"));
        assert!(text.trim_end().ends_with("ENDATA"));
        // Fixed columns: the first row name of a COLUMNS entry starts at column 15.
        let line = text.lines().find(|l| l.starts_with("    C0000001")).unwrap();
        assert_eq!(&line[14..18], "COST");
    }
}
