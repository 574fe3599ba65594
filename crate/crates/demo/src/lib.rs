//! WebAssembly bindings behind `www/index.html`.
//!
//! Every export takes plain numbers or JSON strings and returns a JSON
//! string, so the page needs no generated TypeScript types. The `*_json`
//! functions are the same operations for native callers and tests.

use alaplace::operator::{random_structure_samples, verify_structure, ALaplacian};
use alaplace::scenario::{corpus_with_overrides, run_scenario};
use alaplace::youngfn::{conjugate, doubling_constants, estimate_index_bounds, make_young, ConjugateGrid, Family, LogGrid};
use alaplace::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Curve {
    t: Vec<f64>,
    a: Vec<f64>,
    da: Vec<f64>,
    conj_s: Vec<f64>,
    conj: Vec<f64>,
}

fn parse_family(spec: &str) -> Result<Family> {
    let family: Family = serde_json::from_str(spec)?;
    make_young(family)?;
    Ok(family)
}

fn log_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Curves `A`, `A'`, the conjugate, index bounds and doubling constants of a
/// Young function given as JSON, e.g. `{"family":"power","p":3}`.
pub fn young_profile_json(spec: &str, points: usize) -> Result<String> {
    let a = make_young(parse_family(spec)?)?;
    let n = points.clamp(8, 2000);
    let t = log_points(1e-2, 1e2, n);
    let conj = conjugate(&a, &ConjugateGrid::default())?;
    let conj_s: Vec<f64> = log_points(1e-2, 1e2, n).into_iter().filter(|&s| s <= conj.s_max()).collect();
    let curve = Curve {
        a: t.iter().map(|&t| a.value(t)).collect(),
        da: t.iter().map(|&t| a.deriv1(t)).collect(),
        conj: conj_s.iter().map(|&s| conj.eval(s)).collect(),
        t,
        conj_s,
    };
    let grid = LogGrid::default_for(&a);
    let estimated = estimate_index_bounds(&a, &grid)?;
    let bounds = a.analytic_bounds().unwrap_or(estimated);
    let doubling = doubling_constants(&a, &bounds, &grid)?;
    Ok(json!({
        "name": a.name(),
        "curve": curve,
        "estimated": estimated,
        "analytic": a.analytic_bounds(),
        "doubling": doubling,
        "doubling_margins": doubling.margins(&bounds),
    })
    .to_string())
}

/// Solve a corpus entry at mesh width `h`. A finite `p` replaces the
/// exponent of the entry's Young function.
pub fn solve_corpus_json(id: &str, h: f64, p: f64) -> Result<String> {
    let patch = p.is_finite().then(|| json!({"young": {"p": p}}));
    let cfg = corpus_with_overrides(id, patch.as_ref(), Some(h))?;
    let outcome = run_scenario(&cfg)?;
    let field = outcome.solution.as_ref().map(|u| {
        let mesh = u.mesh();
        let grads = u.nodal_gradients();
        json!({
            "dim": mesh.dim(),
            "shape": mesh.shape(),
            "points": mesh.points(),
            "u": u.values(),
            "grad_norm": grads.iter().map(|g| g[0].hypot(g[1])).collect::<Vec<_>>(),
        })
    });
    let r = &outcome.report;
    let solve = r.solve.as_ref();
    Ok(json!({
        "name": r.name,
        "young": cfg.young,
        "passed": r.passed,
        "converged": r.converged,
        "error": r.error,
        "failed_checks": r.failed_checks,
        "warnings": r.warnings,
        "nodes": r.nodes,
        "outer_iterations": solve.map(|s| s.outer_iterations),
        "residual": solve.map(|s| s.residual),
        "residual_history": solve.map(|s| s.residual_history.clone()),
        "radius": solve.map(|s| s.radius),
        "sup_norm": r.checks.sup_norm,
        "field": field,
    })
    .to_string())
}

/// Ellipticity and growth margins of the operator on random samples.
pub fn structure_check_json(spec: &str, dim: usize, samples: usize, seed: u64) -> Result<String> {
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidParameter(format!("dim must be 1 or 2, got {dim}")));
    }
    let op = ALaplacian::new(make_young(parse_family(spec)?)?, dim)?;
    let report = verify_structure(&op, &random_structure_samples(dim, samples.clamp(1, 100_000), 10.0, seed));
    let bounds = op.bounds();
    Ok(json!({
        "report": report,
        "bounds": bounds,
        "ellipticity": op.ellipticity(),
        "lambda": op.lambda_struct(),
    })
    .to_string())
}

/// Corpus ids with descriptions.
pub fn corpus_json() -> String {
    let rows: Vec<Value> = alaplace::scenario::list_corpus()
        .into_iter()
        .map(|(id, d)| json!({"id": id, "description": d}))
        .collect();
    Value::Array(rows).to_string()
}

fn js(r: Result<String>) -> std::result::Result<String, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn young_profile(spec: &str, points: usize) -> std::result::Result<String, JsError> {
    js(young_profile_json(spec, points))
}

#[wasm_bindgen]
pub fn solve_corpus(id: &str, h: f64, p: f64) -> std::result::Result<String, JsError> {
    js(solve_corpus_json(id, h, p))
}

#[wasm_bindgen]
pub fn structure_check(spec: &str, dim: usize, samples: usize, seed: u64) -> std::result::Result<String, JsError> {
    js(structure_check_json(spec, dim, samples, seed))
}

#[wasm_bindgen]
pub fn corpus() -> String {
    corpus_json()
}
