use alaplace::scenario::{
    config_from_str, corpus_value, corpus_with_overrides, load_scenario, run_scenario, write_artifacts, CORPUS_IDS,
};
use alaplace::Error;
use serde_json::json;

#[test]
fn every_corpus_entry_parses() {
    for id in CORPUS_IDS {
        let v = corpus_value(id).unwrap();
        config_from_str(&v.to_string()).unwrap();
    }
}

#[test]
fn unknown_key_reports_path() {
    let mut v = corpus_value("torsion-p2").unwrap();
    v["checks"]["structur"] = json!(true);
    match config_from_str(&v.to_string()) {
        Err(Error::Config { path, .. }) => assert!(path.starts_with("checks"), "{path}"),
        other => panic!("expected config error, got {other:?}"),
    }
}

#[test]
fn overrides_merge_into_corpus_entry() {
    let patch = json!({"young": {"p": 3.0}});
    let cfg = corpus_with_overrides("torsion-p2", Some(&patch), Some(0.125)).unwrap();
    assert_eq!(cfg.h, 0.125);
    assert_eq!(format!("{:?}", cfg.young), "Power { p: 3.0 }");
}

#[test]
fn file_round_trip_and_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("torsion.json");
    let mut v = corpus_value("torsion-p2").unwrap();
    v["h"] = json!(1.0 / 32.0);
    std::fs::write(&path, v.to_string()).unwrap();
    let cfg = load_scenario(&path).unwrap();
    let outcome = run_scenario(&cfg).unwrap();
    assert!(outcome.report.passed, "{:?}", outcome.report.failed_checks);

    let out = dir.path().join("out");
    write_artifacts(&outcome, &out).unwrap();
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], json!(true));
    let plot = std::fs::read_to_string(out.join("plotdata.csv")).unwrap();
    assert!(plot.starts_with("node_id,x,u,grad_norm"));
    assert_eq!(plot.lines().count(), outcome.report.nodes + 1);
    assert!(out.join("field.csv").exists());
}

#[test]
fn runs_are_deterministic() {
    let cfg = corpus_with_overrides("example-4.3", None, Some(1.0 / 16.0)).unwrap();
    let a = run_scenario(&cfg).unwrap();
    let b = run_scenario(&cfg).unwrap();
    assert_eq!(a.solution.unwrap().values(), b.solution.unwrap().values());
    assert_eq!(
        serde_json::to_string(&a.report).unwrap(),
        serde_json::to_string(&b.report).unwrap()
    );
}
