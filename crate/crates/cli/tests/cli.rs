use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridraid"))
        .args(args)
        .current_dir(dir)
        .env("GRIDRAID_OUT", dir.join("out"))
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_embedded_case() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["validate"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.contains("committed capacity    2792.0 MW"), "{s}");
    assert!(s.contains("peak load             2281.0 MW"));
}

#[test]
fn dispatch_writes_csv() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["dispatch", "--case", "rts24.case", "--scenario", "high", "--mode", "sced-dr", "--windows", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(d.path().join("out/dispatch_high_sced-dr.csv")).unwrap();
    assert!(csv.starts_with("window,interval,kind,id,mw,"));
    assert!(csv.lines().any(|l| l.contains(",system,")));
}

#[test]
fn attack_reports_overload() {
    let d = tempfile::tempdir().unwrap();
    let args = ["attack", "--case", "rts24.case", "--scenario", "high", "--target", "23", "--mode", "unlimited", "--q0", "100", "--alpha", "0.3"];
    let o = run(d.path(), &args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let line = stdout(&o).lines().find(|l| l.starts_with("overload")).unwrap().to_string();
    let mw: f64 = line.split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!(mw > 0.0);
    assert!(d.path().join("out/attack_high_23.csv").is_file());
    // Byte-identical on a second run.
    let first = std::fs::read(d.path().join("out/attack_high_23.csv")).unwrap();
    run(d.path(), &args);
    assert_eq!(first, std::fs::read(d.path().join("out/attack_high_23.csv")).unwrap());
}

#[test]
fn unknown_target_is_a_data_error() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["attack", "--case", "rts24.case", "--scenario", "high", "--target", "999"]);
    assert_eq!(o.status.code(), Some(1));
    let e = stderr(&o);
    assert_eq!(e.lines().count(), 1);
    assert!(e.contains("unknown line 999") && e.contains("attack::unknown_line"), "{e}");
}

#[test]
fn usage_errors_exit_3() {
    let d = tempfile::tempdir().unwrap();
    for args in [&["attack"][..], &["frobnicate"], &["attack", "--target", "x"]] {
        let o = run(d.path(), args);
        assert_eq!(o.status.code(), Some(3), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).starts_with("error[cli::usage]"));
    }
    let o = run(d.path(), &["dispatch", "--horizon", "0"]);
    assert_eq!(o.status.code(), Some(3));
    let o = run(d.path(), &["attack", "--target", "23", "--dr-costs", "3,2,1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn infeasible_dispatch_exits_2() {
    let d = tempfile::tempdir().unwrap();
    let case = "SECTION BUS\n1 1\n2 0\nSECTION LINE\n1 1 2 100 500\nSECTION GEN\n1 1 0 50 10 1\n\
                SECTION LOAD\n2 80 80 80 80\nSECTION PARAMS\nscenario_label high\n";
    std::fs::write(d.path().join("tiny.case"), case).unwrap();
    let o = run(d.path(), &["dispatch", "--case", "tiny.case", "--scenario", "high", "--mode", "sced"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("dispatch::infeasible"));
}

#[test]
fn invalid_case_fails_validation() {
    let d = tempfile::tempdir().unwrap();
    let case = "SECTION BUS\n1 1\n2 1\nSECTION LINE\n1 1 2 100 0\nSECTION GEN\n1 1 0 50 10 1\n\
                SECTION LOAD\n2 10\nSECTION PARAMS\nscenario_label low\n";
    std::fs::write(d.path().join("bad.case"), case).unwrap();
    let o = run(d.path(), &["validate", "--case", "bad.case", "--scenario", "low"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("multiple slack buses"));
    let o = run(d.path(), &["validate", "--case", "missing.case"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("cli::case_not_found"));
    std::fs::write(d.path().join("broken.case"), case.replace("2 1\n", "2 x\n")).unwrap();
    let o = run(d.path(), &["validate", "--case", "broken.case"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("line 3: expected 0 or 1"), "{}", stderr(&o));
}

#[test]
fn sweeps_and_study_write_named_tables() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["sweep", "--parameter", "alpha"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let a = std::fs::read_to_string(d.path().join("out/alpha_sweep_high_all.csv")).unwrap();
    assert_eq!(a.lines().count(), 31);
    assert!(d.path().join("out/alpha_sweep_high_all.gp").is_file());
    let o = run(d.path(), &["sweep", "--parameter", "q0"]);
    assert_eq!(o.status.code(), Some(0));
    let q = std::fs::read_to_string(d.path().join("out/q0_sweep_high_23.csv")).unwrap();
    assert_eq!(q.lines().count(), 23);
    let o = run(d.path(), &["study"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["benefit_all_all.csv", "loading_high_all.csv", "demand_level_all_23.csv", "study_summary.txt"] {
        assert!(d.path().join("out").join(f).is_file(), "{f}");
    }
}

#[test]
fn out_flag_and_help() {
    let d = tempfile::tempdir().unwrap();
    let o = run(d.path(), &["dispatch", "--mode", "sced", "--windows", "1", "--out", "elsewhere"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(d.path().join("elsewhere/dispatch_high_sced.csv").is_file());
    for sub in ["validate", "dispatch", "attack", "sweep", "study"] {
        let o = run(d.path(), &[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let h = stdout(&o);
        assert!(h.contains("Defaults:") && h.contains("--case"), "{sub}");
    }
    let h = stdout(&run(d.path(), &["attack", "--help"]));
    assert!(h.contains("[default: 0.3]") && h.contains("[default: 100]") && h.contains("[default: 10]"));
}

#[test]
fn scenario_file_override() {
    let d = tempfile::tempdir().unwrap();
    let high = include_str!("../../core/data/rts24_high.load");
    let load: String = high.lines().filter(|l| !l.starts_with("scenario_label")).map(|l| format!("{l}\n")).collect();
    std::fs::write(d.path().join("my.load"), load).unwrap();
    let o = run(d.path(), &["dispatch", "--scenario", "my.load", "--windows", "1", "--mode", "sced"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(d.path().join("out/dispatch_my_sced.csv").is_file());
}
