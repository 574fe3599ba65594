use alaplace_demo::{corpus_json, solve_corpus_json, structure_check_json, young_profile_json};
use serde_json::Value;

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn young_profile_of_quadratic() {
    let v = parse(young_profile_json(r#"{"family":"power","p":2.0}"#, 50).unwrap());
    let curve = &v["curve"];
    let t = curve["t"].as_array().unwrap();
    assert_eq!(t.len(), 50);
    for (t, a) in t.iter().zip(curve["a"].as_array().unwrap()) {
        let t = t.as_f64().unwrap();
        assert!((a.as_f64().unwrap() - 0.5 * t * t).abs() <= 1e-12 * t * t);
    }
    // t²/2 is its own conjugate
    for (s, c) in curve["conj_s"].as_array().unwrap().iter().zip(curve["conj"].as_array().unwrap()) {
        let s = s.as_f64().unwrap();
        assert!((c.as_f64().unwrap() - 0.5 * s * s).abs() <= 1e-8 * s * s);
    }
    assert_eq!(v["analytic"]["delta"], 1.0);
}

#[test]
fn bad_family_is_rejected() {
    assert!(young_profile_json(r#"{"family":"power","p":0.5}"#, 50).is_err());
    assert!(young_profile_json("not json", 50).is_err());
}

#[test]
fn corpus_solve_with_exponent_override() {
    let v = parse(solve_corpus_json("plaplace-exact", 1.0 / 32.0, f64::NAN).unwrap());
    assert_eq!(v["passed"], true);
    assert_eq!(v["field"]["dim"], 1);
    let v = parse(solve_corpus_json("torsion-p2", 1.0 / 32.0, 2.5).unwrap());
    assert_eq!(v["young"]["p"], 2.5);
    assert_eq!(v["converged"], true);
    let u = v["field"]["u"].as_array().unwrap();
    assert_eq!(u.len(), 65);
}

#[test]
fn corpus_solve_2d_field() {
    let v = parse(solve_corpus_json("torsion-p3", 0.125, f64::NAN).unwrap());
    assert_eq!(v["field"]["dim"], 2);
    assert_eq!(v["field"]["points"].as_array().unwrap().len(), 81);
}

#[test]
fn structure_check_passes_for_builtin_family() {
    let v = parse(structure_check_json(r#"{"family":"power_log","p":2.0,"q":1.0,"sign":"+"}"#, 2, 500, 7).unwrap());
    assert_eq!(v["report"]["passed"], true);
    assert!(structure_check_json(r#"{"family":"power","p":2.0}"#, 3, 10, 0).is_err());
}

#[test]
fn corpus_listing() {
    let v = parse(corpus_json());
    assert_eq!(v.as_array().unwrap().len(), 7);
}
