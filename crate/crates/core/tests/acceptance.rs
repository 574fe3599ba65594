//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::process::ExitCode;
use std::sync::Arc;

use alaplace::analysis::{positivity_certificate, PositivityCertificate};
use alaplace::discretize::{assemble, build_mesh, energy, DiscreteField, Domain, Mesh};
use alaplace::operator::{random_structure_samples, verify_structure, ALaplacian};
use alaplace::scenario::{build_problem, corpus_with_overrides, run_scenario, ScenarioConfig, ScenarioOutcome};
use alaplace::solver::solve_problem;
use alaplace::youngfn::{
    check_holder, conjugate, doubling_constants, estimate_index_bounds, make_young, ConjugateGrid, Family, LogGrid,
    LogSign, YoungFunction,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

type Outcome = Result<String, String>;

fn families() -> Vec<Family> {
    vec![
        Family::Power { p: 3.0 },
        Family::PowerSum { p: 3.0, q: 2.0 },
        Family::SqrtShift { gamma: 1.5 },
        Family::PowerLog { p: 2.0, q: 1.0, sign: LogSign::Plus },
        Family::PowerLog { p: 3.0, q: 1.0, sign: LogSign::Minus },
    ]
}

fn young(f: Family) -> YoungFunction {
    make_young(f).unwrap()
}

fn ensure(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn index_bounds() -> Outcome {
    // (family, δ, g₀) as stated for the three example operators.
    let cases = [
        (Family::PowerSum { p: 3.0, q: 2.0 }, 1.0, 2.0),
        (Family::PowerLog { p: 2.0, q: 1.0, sign: LogSign::Plus }, 1.0, 2.0),
        (Family::PowerLog { p: 3.0, q: 1.0, sign: LogSign::Minus }, 1.0, 2.0),
    ];
    let mut worst: f64 = 0.0;
    for (f, delta, g0) in cases {
        let a = young(f);
        let b = estimate_index_bounds(&a, &LogGrid::default_for(&a)).map_err(|e| e.to_string())?;
        worst = worst.max((b.delta - delta).abs()).max((b.g0 - g0).abs());
    }
    ensure(worst <= 1e-3, format!("worst |estimate - stated| = {worst:.3e} (tol 1e-3)"))
}

fn structure() -> Outcome {
    let mut worst = f64::INFINITY;
    for f in families() {
        for dim in [1, 2] {
            let op = ALaplacian::new(young(f), dim).unwrap();
            let r = verify_structure(&op, &random_structure_samples(dim, 10_000, 10.0, 7));
            if r.samples != 10_000 {
                return Err(format!("only {} samples", r.samples));
            }
            worst = worst.min(r.margin_ellipticity).min(r.margin_growth);
        }
    }
    ensure(worst >= -1e-10, format!("worst margin {worst:.3e} over 5 families x n=1,2 x 1e4 samples"))
}

fn reference_error(id: &str, h: f64) -> Result<f64, String> {
    let cfg = corpus_with_overrides(id, None, Some(h)).map_err(|e| e.to_string())?;
    let out = run_scenario(&cfg).map_err(|e| e.to_string())?;
    if !out.report.converged {
        return Err(format!("{id} at h={h} did not converge"));
    }
    Ok(out.report.checks.reference.ok_or("no reference")?.sup_error)
}

fn manufactured() -> Outcome {
    let e2 = reference_error("torsion-p2", 1.0 / 64.0)?;
    let e2h = reference_error("torsion-p2", 1.0 / 128.0)?;
    let e3 = reference_error("plaplace-exact", 1.0 / 128.0)?;
    let e3h = reference_error("plaplace-exact", 1.0 / 256.0)?;
    let (r2, r3) = (e2 / e2h, e3 / e3h);
    ensure(
        e2 <= 1e-3 && e3 <= 5e-3 && r2 >= 1.6 && r3 >= 1.6,
        format!("torsion-p2 {e2:.2e} (ratio {r2:.2}), plaplace-exact {e3:.2e} (ratio {r3:.2})"),
    )
}

fn random_field(mesh: &Arc<Mesh>, rng: &mut ChaCha8Rng) -> DiscreteField {
    let mut v = vec![0.0; mesh.node_count()];
    for &n in mesh.interior_nodes() {
        v[n] = rng.gen_range(-1.0..1.0);
    }
    DiscreteField::new(mesh.clone(), v).unwrap()
}

fn perturbed(u: &DiscreteField, node: usize, d: f64) -> DiscreteField {
    let mut v = u.values().to_vec();
    v[node] += d;
    DiscreteField::new(u.mesh().clone(), v).unwrap()
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let num = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let den = b.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    num / den.max(f64::MIN_POSITIVE)
}

fn derivatives() -> Outcome {
    let meshes = [
        Arc::new(build_mesh(Domain::Interval { lo: -1.0, hi: 1.0 }, 0.125).unwrap()),
        Arc::new(build_mesh(Domain::Rectangle { lo: [0.0, 0.0], hi: [1.0, 1.0] }, 0.25).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut wg, mut wh) = (0.0f64, 0.0f64);
    for f in families() {
        for k in 0..20 {
            let mesh = &meshes[k % 2];
            let op = ALaplacian::new(young(f), mesh.dim()).unwrap();
            let load: Vec<f64> = (0..mesh.node_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let u = random_field(mesh, &mut rng);
            let sys = assemble(&op, &load, &u).map_err(|e| e.to_string())?;
            let step = 1e-6;
            let fd_g: Vec<f64> = mesh
                .interior_nodes()
                .iter()
                .map(|&n| {
                    let jp = energy(&op, &load, &perturbed(&u, n, step)).unwrap();
                    let jm = energy(&op, &load, &perturbed(&u, n, -step)).unwrap();
                    (jp - jm) / (2.0 * step)
                })
                .collect();
            wg = wg.max(rel(&fd_g, &sys.gradient));
            let dense = sys.hessian.to_dense();
            for (col, &n) in mesh.interior_nodes().iter().enumerate() {
                let gp = assemble(&op, &load, &perturbed(&u, n, step)).unwrap().gradient;
                let gm = assemble(&op, &load, &perturbed(&u, n, -step)).unwrap().gradient;
                let fd: Vec<f64> = gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * step)).collect();
                let exact: Vec<f64> = dense.iter().map(|row| row[col]).collect();
                wh = wh.max(rel(&fd, &exact));
            }
        }
    }
    ensure(
        wg <= 1e-6 && wh <= 1e-5,
        format!("gradient rel err {wg:.2e} (tol 1e-6), Hessian rel err {wh:.2e} (tol 1e-5), 20 fields x 5 families"),
    )
}

fn corpus_run(id: &str, patch: Option<serde_json::Value>) -> Result<(ScenarioConfig, ScenarioOutcome), String> {
    let cfg = corpus_with_overrides(id, patch.as_ref(), None).map_err(|e| e.to_string())?;
    let out = run_scenario(&cfg).map_err(|e| e.to_string())?;
    Ok((cfg, out))
}

fn example_41_2d() -> serde_json::Value {
    json!({"domain": {"kind": "rectangle", "lo": [-1.0, -1.0], "hi": [1.0, 1.0]}, "h": 0.125})
}

fn bracketing() -> Outcome {
    let runs = [
        ("example-4.1", None),
        ("example-4.1 2D", Some(example_41_2d())),
        ("example-4.2", None),
        ("example-4.4", None),
    ];
    let mut notes = Vec::new();
    let mut ok = true;
    for (label, patch) in runs {
        let id = label.split(' ').next().unwrap();
        let (cfg, out) = corpus_run(id, patch)?;
        let problem = build_problem(&cfg).map_err(|e| e.to_string())?;
        let s = out.report.solve.as_ref().ok_or("no solve report")?;
        let u = out.solution.as_ref().ok_or("no solution")?;
        let inside = problem.bracket.contains(u);
        let good = s.converged && s.residual < 1e-8 && inside && s.bracket_violation == 0.0;
        ok &= good;
        notes.push(format!(
            "{label}[{} nodes]: res {:.1e}, clamp {:.1e}, inside {inside}",
            u.values().len(),
            s.residual,
            s.bracket_violation
        ));
    }
    ensure(ok, notes.join("; "))
}

fn signs() -> Outcome {
    let (_, pos) = corpus_run("example-4.2", None)?;
    let (_, neg) = corpus_run("example-4.4", None)?;
    let p = pos.report.checks.sign.as_ref().ok_or("no sign check")?;
    let n = neg.report.checks.sign.as_ref().ok_or("no sign check")?;
    let u = neg.solution.as_ref().ok_or("no solution")?;
    let nonpos = u.values().iter().all(|&v| v <= 0.0);
    ensure(
        pos.report.converged && neg.report.converged && p.passed && n.passed && nonpos,
        format!(
            "example-4.2 min interior u = {:.3e}; example-4.4 max interior u = {:.3e}, u <= 0 everywhere: {nonpos}",
            p.min_signed, -n.min_signed
        ),
    )
}

fn r_independence() -> Outcome {
    let mut runs: Vec<(String, Option<serde_json::Value>)> = alaplace::scenario::CORPUS_IDS
        .iter()
        .map(|id| (id.to_string(), None))
        .collect();
    runs.push(("example-4.1".into(), Some(example_41_2d())));
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (id, patch) in runs {
        let cfg = corpus_with_overrides(&id, patch.as_ref(), None).map_err(|e| e.to_string())?;
        let mut problem = build_problem(&cfg).map_err(|e| e.to_string())?;
        let first = solve_problem(&problem).map_err(|e| format!("{id}: {e}"))?;
        if first.max_gradient > first.radius / 2.0 {
            continue;
        }
        problem.settings.initial_radius = Some(2.0 * first.radius);
        let second = solve_problem(&problem).map_err(|e| format!("{id} at 2R: {e}"))?;
        let d = first
            .solution()
            .values()
            .iter()
            .zip(second.solution().values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        worst = worst.max(d);
        checked += 1;
    }
    ensure(
        worst <= 1e-10 && checked > 0,
        format!("{checked} runs with max|grad u| <= R/2, worst nodal change at 2R {worst:.2e}"),
    )
}

fn conjugate_duality() -> Outcome {
    let a = young(Family::Power { p: 3.0 });
    let conj = conjugate(&a, &ConjugateGrid::default()).map_err(|e| e.to_string())?;
    let mut worst_c: f64 = 0.0;
    for i in 0..50 {
        let s = 10f64.powf(-3.0 + 6.0 * i as f64 / 49.0);
        let exact = s.powf(1.5) / 1.5;
        worst_c = worst_c.max((conj.eval(s) - exact).abs() / exact);
    }
    let grid = ConjugateGrid::new(1e-2, 10.0, 200, 1e-10, 1e4, 4001).unwrap();
    let back = conjugate(&conj, &grid).map_err(|e| e.to_string())?;
    let mut worst_d: f64 = 0.0;
    for i in 0..50 {
        let t = 10f64.powf(-2.0 + 3.0 * i as f64 / 49.0);
        worst_d = worst_d.max((back.eval(t) - a.value(t)).abs() / a.value(t));
    }
    let mesh = Arc::new(build_mesh(Domain::Interval { lo: -1.0, hi: 1.0 }, 1.0 / 16.0).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut holder_ok = 0;
    for _ in 0..100 {
        let scale: f64 = 10f64.powf(rng.gen_range(-1.0..1.0));
        let n = mesh.node_count();
        let u: Vec<f64> = (0..n).map(|_| scale * rng.gen_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let u = DiscreteField::new(mesh.clone(), u).unwrap();
        let v = DiscreteField::new(mesh.clone(), v).unwrap();
        if check_holder(&u, &v, &a, &conj).map_err(|e| e.to_string())?.passed {
            holder_ok += 1;
        }
    }
    ensure(
        worst_c <= 1e-6 && worst_d <= 1e-6 && holder_ok == 100,
        format!("conjugate rel err {worst_c:.2e}, double conjugate {worst_d:.2e}, Hölder {holder_ok}/100"),
    )
}

fn certificate() -> Outcome {
    let a = young(Family::Power { p: 2.0 });
    let bounds = a.analytic_bounds().unwrap();
    let k = doubling_constants(&a, &bounds, &LogGrid::default_for(&a)).map_err(|e| e.to_string())?;
    let cert = PositivityCertificate { k: 1.0, delta_bar: 1.0 };
    let r = positivity_certificate(&cert, &a, &bounds, &k, 100).map_err(|e| e.to_string())?;
    let worst = r
        .margin_h_lower
        .min(r.margin_b_upper)
        .min(r.margin_doubling)
        .min(r.margin_reciprocal);
    ensure(
        worst >= -1e-9 && r.samples == 100 && r.s_min == 1e-8,
        format!("worst margin {worst:.2e} over {} samples in [{:.0e}, {}]", r.samples, r.s_min, r.s_max),
    )
}

fn hypothesis_checkers() -> Outcome {
    let cfg = corpus_with_overrides("example-4.1", None, None).map_err(|e| e.to_string())?;
    let problem = build_problem(&cfg).map_err(|e| e.to_string())?;
    let a = problem.op.young();
    let good = alaplace::analysis::check_growth_h(&problem.convection, &problem.bracket, a, 9, 16, 1)
        .map_err(|e| e.to_string())?;
    let weak = corpus_with_overrides(
        "example-4.1",
        Some(&json!({"convection": {"growth": {"a": 0.5}}})),
        None,
    )
    .map_err(|e| e.to_string())?;
    let weak = build_problem(&weak).map_err(|e| e.to_string())?;
    let bad = alaplace::analysis::check_growth_h(&weak.convection, &weak.bracket, a, 9, 16, 1)
        .map_err(|e| e.to_string())?;
    ensure(
        good.passed && good.worst_margin >= 0.0 && !bad.passed && bad.worst_margin < 0.0,
        format!(
            "declared bound margin {:.3e}; halved a margin {:.3e}",
            good.worst_margin, bad.worst_margin
        ),
    )
}

fn doubling() -> Outcome {
    let mut worst = f64::INFINITY;
    for f in families() {
        let a = young(f);
        let b = a.analytic_bounds().unwrap();
        let k = doubling_constants(&a, &b, &LogGrid::default_for(&a)).map_err(|e| e.to_string())?;
        let (m1, m2) = k.margins(&b);
        worst = worst.min(m1).min(m2);
    }
    ensure(worst >= -1e-9, format!("worst margin {worst:.3e} over 5 families"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("index bounds", index_bounds),
        ("structure inequalities", structure),
        ("manufactured solutions", manufactured),
        ("derivative consistency", derivatives),
        ("bracketing", bracketing),
        ("sign conclusions", signs),
        ("R-independence", r_independence),
        ("conjugate duality", conjugate_duality),
        ("positivity certificate", certificate),
        ("hypothesis checkers", hypothesis_checkers),
        ("doubling constants", doubling),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = std::time::Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} ({secs:.1}s)", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
