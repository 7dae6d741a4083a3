//! Attack results as CSV: one `bus` row per bus, one `line` row per line,
//! and a final `target` row. Columns that do not apply are empty.
//!
//! | column          | bus                 | line           | target            |
//! |-----------------|---------------------|----------------|-------------------|
//! | scheduled_dr_mw | scheduled DR        |                | system total      |
//! | false_dr_mw     | false DR signal     |                | system total      |
//! | false_load_mw   | faked measurement   |                |                   |
//! | pre / post      | angle (rad)         | flow (MW)      | target flow (MW)  |
//! | rating_mw       |                     | rating         | rating            |
//! | loading_pre/post|                     | abs(flow)/rating | same            |
//! | overload_mw     |                     |                | abs(post) − rating, floored at 0 |

use super::AttackResult;
use crate::dispatch::num;
use crate::grid_model::GridCase;

pub const ATTACK_CSV_HEADER: [&str; 11] = [
    "kind",
    "id",
    "scheduled_dr_mw",
    "false_dr_mw",
    "false_load_mw",
    "pre",
    "post",
    "rating_mw",
    "loading_pre",
    "loading_post",
    "overload_mw",
];

pub fn attack_csv(case: &GridCase, r: &AttackResult) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(ATTACK_CSV_HEADER).expect("in-memory write");
    let e = String::new;
    for (n, b) in case.buses.iter().enumerate() {
        w.write_record([
            "bus".into(),
            b.id.to_string(),
            num(r.scheduled_dr[n]),
            num(r.false_dr[n]),
            num(r.false_load_mw[n]),
            num(r.pre_attack_angles[n]),
            num(r.attacked_angles[n]),
            e(), e(), e(), e(),
        ])
        .expect("in-memory write");
    }
    for (k, l) in case.lines.iter().enumerate() {
        let (pre, post) = (r.pre_attack_flows[k], r.attacked_flows[k]);
        w.write_record([
            "line".into(),
            l.id.to_string(),
            e(), e(), e(),
            num(pre),
            num(post),
            num(l.rating_mw),
            num(pre.abs() / l.rating_mw),
            num(post.abs() / l.rating_mw),
            e(),
        ])
        .expect("in-memory write");
    }
    w.write_record([
        "target".into(),
        r.spec.target_line.to_string(),
        num(r.scheduled_dr.iter().sum()),
        num(r.false_dr.iter().sum()),
        e(),
        num(r.pre_attack_flow_mw),
        num(r.attacked_flows[r.target_position(case)]),
        num(r.rating_mw),
        num(r.loading_rate_pre),
        num(r.loading_rate_post),
        num(r.overload_mw),
    ])
    .expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}
