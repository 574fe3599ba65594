use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{build_problem, ScenarioConfig};
use crate::analysis::{
    check_growth_h, check_hypothesis_h, check_interior_sign, positivity_certificate, verify_subsolution,
    verify_supersolution, CertificateReport, GrowthReport, HypothesisReport, SignReport, WeakInequalityReport, MARGIN_TOLERANCE,
};
use crate::discretize::DiscreteField;
use crate::operator::{convection_bound_margin, random_structure_samples, verify_structure, StructureReport};
use crate::solver::{solve_problem, Problem, SolveReport};
use crate::youngfn::{
    conjugate, doubling_constants, estimate_index_bounds, make_young, ConjugateGrid, DoublingConstants, IndexBounds,
    LogGrid,
};
use crate::{Error, Result};

const NONTRIVIAL_THRESHOLD: f64 = 1e-3;
const SUB_SUPER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceError {
    /// Max error over nodes and cell centroids.
    pub sup_error: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct CheckResults {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub growth_h: Option<GrowthReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hypothesis_h: Option<HypothesisReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<SignReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsolution: Option<WeakInequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub supersolution: Option<WeakInequalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceError>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_norm: Option<f64>,
}

impl CheckResults {
    fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        let mut push = |name, ok: Option<bool>| {
            if ok == Some(false) {
                out.push(name);
            }
        };
        push("structure", self.structure.as_ref().map(|r| r.passed));
        push("growth_h", self.growth_h.as_ref().map(|r| r.passed));
        push("hypothesis_h", self.hypothesis_h.as_ref().map(|r| r.passed));
        push("sign", self.sign.as_ref().map(|r| r.passed));
        push("certificate", self.certificate.as_ref().map(|r| r.passed));
        push("subsolution", self.subsolution.as_ref().map(|r| r.passed));
        push("supersolution", self.supersolution.as_ref().map(|r| r.passed));
        push("reference", self.reference.as_ref().map(|r| r.passed));
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub passed: bool,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub failed_checks: Vec<&'static str>,
    pub warnings: Vec<String>,
    pub nodes: usize,
    pub cells: usize,
    pub h: f64,
    pub bounds: IndexBounds,
    pub lambda: f64,
    pub big_lambda: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve: Option<SolveReport>,
    pub checks: CheckResults,
}

/// Report plus the computed field (absent when the solve failed early).
#[derive(Debug, Clone)]
pub struct ScenarioOutcome {
    pub report: ScenarioReport,
    pub solution: Option<DiscreteField>,
}

fn pre_solve_checks(cfg: &ScenarioConfig, problem: &Problem, out: &mut CheckResults) -> Result<()> {
    let op = &problem.op;
    let c = &cfg.checks;
    if c.structure {
        let samples = random_structure_samples(op.dim(), c.structure_samples, 10.0, 0);
        let mut r = verify_structure(op, &samples);
        if let Some(g) = &problem.convection.growth {
            let mesh = &problem.mesh;
            let sigma_max = (0..mesh.node_count())
                .map(|i| (g.sigma)(mesh.coords(i)))
                .fold(0.0, f64::max);
            let lambda1 = sigma_max.max(g.a / op.ellipticity());
            let mut pairs = Vec::new();
            for i in 0..mesh.node_count() {
                let x = mesh.coords(i);
                let (lo, hi) = (problem.bracket.lower().values()[i], problem.bracket.upper().values()[i]);
                for s in [lo, 0.5 * (lo + hi), hi] {
                    for e in -3..=3 {
                        let mut xi = vec![0.0; op.dim()];
                        xi[0] = 10f64.powi(e);
                        pairs.push((problem.convection.eval(x, s, &xi), xi[0]));
                    }
                }
            }
            r = r.with_convection_margin(convection_bound_margin(op, lambda1, pairs));
        }
        out.structure = Some(r);
    }
    if c.growth_h {
        out.growth_h = Some(check_growth_h(&problem.convection, &problem.bracket, op.young(), 9, 16, 1)?);
    }
    if c.hypothesis_h {
        let h = problem
            .convection
            .one_sided
            .as_ref()
            .ok_or_else(|| Error::config("checks.hypothesis_h", "requires convection.one_sided"))?;
        out.hypothesis_h = Some(check_hypothesis_h(h, op.young(), &problem.mesh, 200));
    }
    if let Some(cert) = &c.certificate {
        let a = op.young();
        let k = doubling_constants(a, op.bounds(), &LogGrid::default_for(a))?;
        out.certificate = Some(positivity_certificate(cert, a, op.bounds(), &k, 100)?);
    }
    if c.sub_super {
        let (lower, upper) = match cfg.bracket {
            super::BracketConfig::Constant { lower, upper } => (
                DiscreteField::constant(problem.mesh.clone(), lower),
                DiscreteField::constant(problem.mesh.clone(), upper),
            ),
            super::BracketConfig::Auxiliary { .. } => {
                (problem.bracket.lower().clone(), problem.bracket.upper().clone())
            }
        };
        out.subsolution = Some(verify_subsolution(&lower, &problem.convection, op, SUB_SUPER_TOL)?);
        out.supersolution = Some(verify_supersolution(&upper, &problem.convection, op, SUB_SUPER_TOL)?);
    }
    Ok(())
}

fn reference_error(cfg: &ScenarioConfig, u: &DiscreteField) -> Option<ReferenceError> {
    let r = cfg.reference.as_ref()?;
    let mesh = u.mesh();
    let mut err: f64 = 0.0;
    for i in 0..mesh.node_count() {
        err = err.max((u.values()[i] - r.eval(mesh.coords(i))).abs());
    }
    for c in 0..mesh.cell_count() {
        let x = mesh.cell_centroid(c);
        err = err.max((u.cell_mean(c) - r.eval(&x[..mesh.dim()])).abs());
    }
    Some(ReferenceError {
        sup_error: err,
        tol: r.tol(),
        passed: err <= r.tol(),
    })
}

/// Build, check, solve and post-check one scenario. Configuration errors
/// are returned as `Err`; solver failures end up in the report.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let problem = build_problem(cfg)?;
    let mut checks = CheckResults::default();
    pre_solve_checks(cfg, &problem, &mut checks)?;
    let mut warnings = Vec::new();
    let (solve, error) = match solve_problem(&problem) {
        Ok(r) => (Some(r), None),
        Err(Error::NotConverged { reason, report }) => (Some(*report), Some(reason)),
        Err(e) => (None, Some(e.to_string())),
    };
    let solution = solve.as_ref().and_then(|s| s.solution.clone());
    let converged = solve.as_ref().map_or(false, |s| s.converged) && error.is_none();
    if let Some(u) = &solution {
        checks.sup_norm = Some(u.sup_norm());
        if let Some(sign) = cfg.checks.sign {
            checks.sign = Some(check_interior_sign(u, sign));
        }
        checks.reference = reference_error(cfg, u);
        if cfg.checks.nontrivial && u.sup_norm() < NONTRIVIAL_THRESHOLD {
            warnings.push(format!("solution is nearly trivial: |u|_inf = {:e}", u.sup_norm()));
        }
    }
    if let Some(s) = &solve {
        if s.bracket_active {
            warnings.push(format!("clamp active in the last step ({:e})", s.bracket_violation));
        }
    }
    let failed_checks = checks.failures();
    let op = &problem.op;
    let report = ScenarioReport {
        name: cfg.name.clone(),
        passed: converged && failed_checks.is_empty(),
        converged,
        error,
        failed_checks,
        warnings,
        nodes: problem.mesh.node_count(),
        cells: problem.mesh.cell_count(),
        h: problem.mesh.h(),
        bounds: *op.bounds(),
        lambda: op.lambda_struct(),
        big_lambda: op.big_lambda(),
        solve,
        checks,
    };
    Ok(ScenarioOutcome { report, solution })
}

fn write_field_csv(u: &DiscreteField, path: &Path) -> Result<()> {
    u.write_csv(BufWriter::new(File::create(path)?))
}

fn write_plotdata(u: &DiscreteField, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let mesh = u.mesh();
    let grads = u.nodal_gradients();
    if mesh.dim() == 1 {
        writeln!(w, "node_id,x,u,grad_norm")?;
    } else {
        writeln!(w, "node_id,x,y,u,grad_norm")?;
    }
    for i in 0..mesh.node_count() {
        let p = mesh.point(i);
        let g = crate::operator::norm(&grads[i][..mesh.dim()]);
        if mesh.dim() == 1 {
            writeln!(w, "{i},{:?},{:?},{:?}", p[0], u.values()[i], g)?;
        } else {
            writeln!(w, "{i},{:?},{:?},{:?},{:?}", p[0], p[1], u.values()[i], g)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Write `report.json`, and `field.csv` / `plotdata.csv` when a field exists.
pub fn write_artifacts(outcome: &ScenarioOutcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(&outcome.report)?;
    json.push('\n');
    std::fs::write(dir.join("report.json"), json)?;
    if let Some(u) = &outcome.solution {
        write_field_csv(u, &dir.join("field.csv"))?;
        write_plotdata(u, &dir.join("plotdata.csv"))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct YoungReport {
    pub name: String,
    pub grid_points: usize,
    pub estimated: IndexBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic: Option<IndexBounds>,
    pub doubling: DoublingConstants,
    /// `(2^{g₀+1} - K_Δ2, K_∇2 - 2^{δ+1})` with the operator's bounds.
    pub doubling_margins: (f64, f64),
    /// `(s, Ã(s))` at a few points.
    pub conjugate: Vec<(f64, f64)>,
    pub passed: bool,
}

/// Agreement required between estimated and closed-form index bounds.
pub const INDEX_TOLERANCE: f64 = 1e-3;

/// Index, doubling and conjugate summary of the config's Young function.
pub fn check_young(cfg: &ScenarioConfig) -> Result<YoungReport> {
    let a = make_young(cfg.young).map_err(|e| super::Error::config("young", e.to_string()))?;
    let grid = LogGrid::default_for(&a);
    let estimated = estimate_index_bounds(&a, &grid)?;
    let analytic = a.analytic_bounds();
    let bounds = analytic.unwrap_or(estimated);
    let doubling = doubling_constants(&a, &bounds, &grid)?;
    let conj = conjugate(&a, &ConjugateGrid::default())?;
    let conjugate = [0.01, 0.1, 1.0, 10.0, 100.0].iter().map(|&s| (s, conj.eval(s))).collect();
    let margins = doubling.margins(&bounds);
    let indices_ok = analytic.map_or(true, |b| {
        [
            (estimated.delta, b.delta),
            (estimated.g0, b.g0),
            (estimated.p_a, b.p_a),
            (estimated.q_a, b.q_a),
        ]
        .iter()
        .all(|(e, a)| (e - a).abs() <= INDEX_TOLERANCE)
    });
    let passed = indices_ok && margins.0 >= -MARGIN_TOLERANCE && margins.1 >= -MARGIN_TOLERANCE;
    Ok(YoungReport {
        name: a.name(),
        grid_points: grid.len(),
        estimated,
        analytic,
        doubling_margins: margins,
        doubling,
        conjugate,
        passed,
    })
}

/// Structure inequalities on 10⁴ random samples.
pub fn check_structure(cfg: &ScenarioConfig) -> Result<StructureReport> {
    let a = make_young(cfg.young).map_err(|e| super::Error::config("young", e.to_string()))?;
    let op = crate::operator::ALaplacian::new(a, cfg.domain.dim())?;
    Ok(verify_structure(&op, &random_structure_samples(op.dim(), 10_000, 10.0, 0)))
}
