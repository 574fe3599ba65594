use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn alap(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alap")).args(args).current_dir(cwd).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn torsion_config(h: f64) -> Value {
    let mut c = alaplace::scenario::corpus_value("torsion-p2").unwrap();
    c["name"] = json!("torsion");
    c["h"] = json!(h);
    c
}

#[test]
fn corpus_list_has_seven_entries() {
    let dir = tempfile::tempdir().unwrap();
    let o = alap(&["corpus", "list", "--json"], dir.path());
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 7);
}

#[test]
fn corpus_run_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let o = alap(&["corpus", "run", "example-4.2", "--h", "0.0625", "--out", "res"], dir.path());
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("PASS example-4.2"));
    let base = dir.path().join("res/example-4.2");
    for f in ["report.json", "field.csv", "plotdata.csv"] {
        assert!(base.join(f).exists(), "{f}");
    }
}

#[test]
fn reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let read = || std::fs::read(dir.path().join("out/example-4.3/report.json")).unwrap();
    assert!(alap(&["corpus", "run", "example-4.3", "--h", "0.0625"], dir.path()).status.success());
    let first = read();
    assert!(alap(&["corpus", "run", "example-4.3", "--h", "0.0625"], dir.path()).status.success());
    assert_eq!(first, read());
}

#[test]
fn overrides_file_is_applied() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("patch.json"), r#"{"name": "renamed"}"#).unwrap();
    let o = alap(
        &["corpus", "run", "torsion-p2", "--h", "0.0625", "--overrides", "patch.json"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(dir.path().join("out/renamed/report.json").exists());
}

#[test]
fn run_several_configs_in_parallel() {
    let dir = tempfile::tempdir().unwrap();
    for (i, h) in [0.03125, 0.015625].iter().enumerate() {
        let mut c = torsion_config(*h);
        c["name"] = json!(format!("t{i}"));
        std::fs::write(dir.path().join(format!("t{i}.json")), c.to_string()).unwrap();
    }
    let o = alap(&["run", "t0.json", "t1.json", "--jobs", "2"], dir.path());
    let out = stdout(&o);
    assert!(o.status.success(), "{out}");
    let lines: Vec<_> = out.lines().collect();
    assert!(lines[0].starts_with("PASS t0") && lines[1].starts_with("PASS t1"), "{out}");
}

#[test]
fn failing_reference_gives_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = torsion_config(0.125);
    // wrong reference profile
    c["reference"]["p_torsion"]["p"] = json!(3.0);
    std::fs::write(dir.path().join("bad.json"), c.to_string()).unwrap();
    let o = alap(&["run", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL torsion"));
}

#[test]
fn unknown_key_gives_exit_two_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = torsion_config(0.125);
    c["settings"] = json!({"outer_tol": 1e-8, "bogus": 1});
    std::fs::write(dir.path().join("c.json"), c.to_string()).unwrap();
    let o = alap(&["run", "c.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("settings.bogus"));
}

#[test]
fn malformed_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), "{ not json").unwrap();
    assert_eq!(alap(&["check", "young", "c.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn check_young_and_structure_pass() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("c.json"), torsion_config(0.125).to_string()).unwrap();
    let o = alap(&["check", "young", "c.json"], dir.path());
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["estimated"]["delta"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    let o = alap(&["check", "structure", "c.json"], dir.path());
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], json!(true));
}
