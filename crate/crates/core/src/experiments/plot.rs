use super::{SweepParameter, SweepTable};

/// gnuplot script plotting post-attack loading against the swept value, one
/// line per (target, mode) series of `table`, reading `csv_file`.
pub fn gnuplot_script(table: &SweepTable, csv_file: &str) -> String {
    let xlabel = match table.parameter {
        SweepParameter::Alpha => "load-shift deviation factor alpha",
        SweepParameter::Q0 => "total DR deviation Q0 (MW)",
    };
    let mut series: Vec<(usize, String)> = Vec::new();
    for r in &table.rows {
        let key = (r.target_line, r.mode.to_string());
        if !series.contains(&key) {
            series.push(key);
        }
    }
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key outside right\n");
    s.push_str(&format!("set xlabel '{xlabel}'\n"));
    s.push_str("set ylabel 'post-attack loading rate'\n");
    s.push_str("set grid\n");
    let parts: Vec<String> = series
        .iter()
        .map(|(t, m)| {
            format!(
                "'{csv_file}' skip 1 using 4:(column(1) == {t} && strcol(2) eq '{m}' ? column(8) : 1/0) with linespoints title 'line {t} {m}'"
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&parts.join(", \\\n     "));
    s.push('\n');
    s
}
