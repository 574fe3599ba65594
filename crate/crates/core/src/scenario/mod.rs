//! JSON scenario configs, the built-in corpus and the end-to-end run
//! pipeline.

mod config;
mod corpus;
mod run;

use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

pub use config::{
    BracketConfig, ChecksConfig, ConvectionConfig, GrowthConfig, OneSidedConfig, Reference, SFn, ScenarioConfig,
    TermConfig, XFn,
};
pub use corpus::{corpus_config, corpus_value, list_corpus, CORPUS_IDS};
pub use run::{
    check_structure, check_young, run_scenario, write_artifacts, CheckResults, ReferenceError, ScenarioOutcome,
    ScenarioReport, YoungReport, INDEX_TOLERANCE,
};

use crate::discretize::{build_mesh, Mesh};
use crate::operator::ALaplacian;
use crate::solver::{auxiliary_supersolution, ConvectionTerm, HypothesisH, Problem, SFunc, SubSuperPair, XFunc};
use crate::youngfn::make_young;
use crate::{Error, Result};

/// Parse a config, reporting the JSON path of the offending field.
pub fn config_from_value(v: Value) -> Result<ScenarioConfig> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = e.path().to_string();
        Error::config(path, e.into_inner().to_string())
    })
}

pub fn config_from_str(s: &str) -> Result<ScenarioConfig> {
    let v: Value = serde_json::from_str(s)?;
    config_from_value(v)
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    config_from_str(&std::fs::read_to_string(path)?)
}

/// JSON merge patch: objects merge recursively, `null` deletes, anything
/// else replaces.
pub fn merge_json(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                if v.is_null() {
                    b.remove(k);
                } else {
                    merge_json(b.entry(k.clone()).or_insert(Value::Null), v);
                }
            }
        }
        (b, p) => *b = p.clone(),
    }
}

/// Corpus entry with an optional merge patch and cell size.
pub fn corpus_with_overrides(id: &str, overrides: Option<&Value>, h: Option<f64>) -> Result<ScenarioConfig> {
    let mut v = corpus_value(id)?;
    if let Some(p) = overrides {
        merge_json(&mut v, p);
    }
    if let Some(h) = h {
        v["h"] = h.into();
    }
    config_from_value(v)
}

fn xfunc(f: &XFn) -> XFunc {
    let f = f.clone();
    Arc::new(move |x| f.eval(x))
}

fn sfunc(f: &SFn) -> SFunc {
    let f = f.clone();
    Arc::new(move |s| f.eval(s))
}

fn convection(cfg: &ConvectionConfig, op: &ALaplacian, name: &str) -> ConvectionTerm {
    let terms = cfg.terms.clone();
    let young = op.young().clone();
    let mut term = ConvectionTerm::new(name, move |x, s, xi| {
        let r = crate::operator::norm(xi);
        terms
            .iter()
            .map(|t| match t {
                TermConfig::Source { g, h } => g.eval(s) * h.eval(x),
                TermConfig::Gradient { a } => {
                    if r == 0.0 {
                        0.0
                    } else {
                        a.eval(s) * young.deriv1(r) * r
                    }
                }
            })
            .sum()
    });
    if let Some(g) = &cfg.growth {
        term = term.with_growth(xfunc(&g.sigma), g.a);
    }
    if let Some(o) = &cfg.one_sided {
        term = term.with_one_sided(HypothesisH {
            rho1: xfunc(&o.rho1),
            rho2: xfunc(&o.rho2),
            g1: sfunc(&o.g1),
            g2: sfunc(&o.g2),
            a: sfunc(&o.a),
            s0: o.s0,
            k1: o.k1,
        });
    }
    term
}

/// Resolve a config into solver input. Auxiliary brackets are solved here.
pub fn build_problem(cfg: &ScenarioConfig) -> Result<Problem> {
    let young = make_young(cfg.young).map_err(|e| Error::config("young", e.to_string()))?;
    let mesh: Arc<Mesh> = Arc::new(build_mesh(cfg.domain, cfg.h).map_err(|e| Error::config("h", e.to_string()))?);
    cfg.settings
        .validate()
        .map_err(|e| Error::config("settings", e.to_string()))?;
    let op = ALaplacian::new(young, mesh.dim())?;
    let convection = convection(&cfg.convection, &op, &cfg.name);
    let bracket = match cfg.bracket {
        BracketConfig::Constant { lower, upper } => SubSuperPair::constant(mesh.clone(), lower, upper)
            .map_err(|e| Error::config("bracket.constant", e.to_string()))?,
        BracketConfig::Auxiliary { lower } => {
            let h = convection
                .one_sided
                .as_ref()
                .ok_or_else(|| Error::config("bracket.auxiliary", "requires convection.one_sided"))?;
            let upper = auxiliary_supersolution(&op, mesh.clone(), &h.rho1, &h.g1, &cfg.settings)?;
            let lower = SubSuperPair::constant(mesh.clone(), lower, lower.max(0.0))?.lower().clone();
            SubSuperPair::new(lower, upper).map_err(|e| Error::config("bracket.auxiliary", e.to_string()))?
        }
    };
    Ok(Problem {
        op,
        mesh,
        convection,
        bracket,
        settings: cfg.settings.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn merge_patch() {
        let mut a = json!({"a": 1, "b": {"c": 2, "d": 3}});
        merge_json(&mut a, &json!({"b": {"c": 5, "d": null}, "e": [1]}));
        assert_eq!(a, json!({"a": 1, "b": {"c": 5}, "e": [1]}));
    }

    #[test]
    fn error_carries_path() {
        let mut v = corpus_value("torsion-p2").unwrap();
        v["settings"] = json!({"outer_tol": 1e-8, "bogus": 1});
        match config_from_value(v) {
            Err(Error::Config { path, .. }) => assert_eq!(path, "settings.bogus"),
            other => panic!("{other:?}"),
        }
        let mut v = corpus_value("torsion-p2").unwrap();
        v["young"]["p"] = json!("three");
        match config_from_value(v) {
            Err(Error::Config { path, .. }) => assert!(path.starts_with("young"), "{path}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn malformed_json() {
        assert!(matches!(config_from_str("{not json"), Err(Error::Json(_))));
    }

    #[test]
    fn override_h() {
        let c = corpus_with_overrides("example-4.1", None, Some(0.125)).unwrap();
        assert_eq!(c.h, 0.125);
        let patch = json!({"domain": {"kind": "rectangle", "lo": [-1.0, -1.0], "hi": [1.0, 1.0]}, "h": 0.125});
        let c = corpus_with_overrides("example-4.1", Some(&patch), None).unwrap();
        assert_eq!(c.domain.dim(), 2);
    }
}
