use std::path::PathBuf;
use std::process::{Command, Output};

fn programs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/programs")
}

fn termdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_termdec")).args(args).output().unwrap()
}

fn prog(name: &str) -> String {
    programs().join(name).to_string_lossy().into_owned()
}

#[test]
fn sort_terminates_and_report_validates() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = termdec(&["prove", &prog("sort.wprog"), "--report", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["verdict"], "TERMINATING");
    assert_eq!(json["modules"].as_array().unwrap().len(), 2);
    let out = termdec(&["check-cert", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches(": ok").count(), 2);
}

#[test]
fn tampered_report_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    termdec(&["prove", &prog("sort.wprog"), "--report", report.to_str().unwrap()]);
    let mut json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let fin = json["modules"][0]["final"].as_str().unwrap().to_string();
    json["modules"][0]["predicates"][fin] = "{true}".into();
    std::fs::write(&report, json.to_string()).unwrap();
    let out = termdec(&["check-cert", report.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn exit_codes() {
    assert_eq!(termdec(&["prove", &prog("diverge.wprog")]).status.code(), Some(1));
    assert_eq!(termdec(&["prove", &prog("sort.wprog"), "--max-iter", "1"]).status.code(), Some(2));
    assert_eq!(termdec(&["prove", &prog("gcd.wprog"), "--state-budget", "20000"]).status.code(), Some(2));
    assert_eq!(termdec(&["prove", "/nonexistent.wprog"]).status.code(), Some(3));
    assert_eq!(termdec(&["prove", &prog("sort.wprog"), "--bogus"]).status.code(), Some(3));
    assert_eq!(termdec(&["prove", &prog("sort.wprog"), "--format", "cfg"]).status.code(), Some(3));
    assert_eq!(termdec(&["prove", &prog("sort.cfg")]).status.code(), Some(0));
    assert_eq!(termdec(&["prove", &prog("straight.wprog")]).status.code(), Some(0));
}

#[test]
fn diverge_reports_lasso_and_remainder() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = termdec(&[
        "prove",
        &prog("diverge.wprog"),
        "--emit-remainder",
        "--report",
        report.to_str().unwrap(),
        "--dot",
        dir.path().join("dot").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("lasso: stem: ε; loop: [assume true] [x := x + 1]"));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(json["verdict"], "UNKNOWN");
    assert!(json["remainder"].as_str().is_some());
    assert!(dir.path().join("dot/remainder.dot").exists());
}

#[test]
fn dot_files_and_stats_row() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("dot");
    let out = termdec(&["prove", &prog("sort.wprog"), "--dot", dot.to_str().unwrap(), "--stats-row"]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["program.dot", "module_0.dot", "module_1.dot"] {
        let text = std::fs::read_to_string(dot.join(f)).unwrap();
        assert!(text.starts_with("digraph"), "{}", f);
        assert!(text.trim_end().ends_with('}'));
    }
    let stdout = String::from_utf8_lossy(&out.stdout);
    let row = stdout.lines().last().unwrap();
    let cols: Vec<&str> = row.split_whitespace().collect();
    assert_eq!(cols.len(), 8);
    assert_eq!(cols[0], "sort.wprog");
    let trivial: usize = cols[5].parse().unwrap();
    let nontrivial: usize = cols[6].parse().unwrap();
    assert_eq!(trivial + nontrivial, 2);
}
