//! Bracketed Picard iteration for `-Δ_A u = f(x, u, ∇u)`, `u = 0` on the
//! boundary.
//!
//! Each outer step freezes the truncated convection `f_R` at the current
//! iterate, minimizes the resulting convex energy with damped Newton, relaxes
//! and clamps the result to the sub/supersolution bracket. When the measured
//! gradient reaches `R` the radius is doubled and the iteration restarted.

mod convection;
mod frozen;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use convection::{
    truncate_convection, ConvectionTerm, FFunc, GrowthBound, HypothesisH, SFunc, TruncatedConvection, XFunc,
};
pub use frozen::{solve_frozen, FrozenStats};

use crate::discretize::{DiscreteField, Mesh};
use crate::operator::ALaplacian;
use crate::{Error, Result};

/// Tolerances and iteration limits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub outer_tol: f64,
    pub inner_tol: f64,
    pub max_outer: usize,
    pub max_newton: usize,
    pub max_backtracks: usize,
    pub armijo: f64,
    pub backtrack: f64,
    pub min_relaxation: f64,
    pub max_escalations: usize,
    /// Starting truncation radius; `None` picks `2 max(1, |∇u₀|_∞)`.
    pub initial_radius: Option<f64>,
    pub parallel: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            outer_tol: 1e-8,
            inner_tol: 1e-10,
            max_outer: 200,
            max_newton: 100,
            max_backtracks: 60,
            armijo: 1e-4,
            backtrack: 0.5,
            min_relaxation: 1.0 / 16.0,
            max_escalations: 10,
            initial_radius: None,
            parallel: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.outer_tol > 0.0
            && self.inner_tol > 0.0
            && self.max_outer > 0
            && self.armijo > 0.0
            && self.armijo < 1.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.min_relaxation > 0.0
            && self.min_relaxation <= 1.0
            && self.initial_radius.map_or(true, |r| r > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter("solver settings out of range".into()))
        }
    }
}

/// Nodal subsolution `u̲` and supersolution `u̅` with `u̲ ≤ u̅`.
#[derive(Debug, Clone)]
pub struct SubSuperPair {
    lower: DiscreteField,
    upper: DiscreteField,
}

impl SubSuperPair {
    pub fn new(lower: DiscreteField, upper: DiscreteField) -> Result<Self> {
        if lower.values().len() != upper.values().len() {
            return Err(Error::InvalidParameter("bracket fields on different meshes".into()));
        }
        let mesh = lower.mesh();
        for (i, (l, u)) in lower.values().iter().zip(upper.values()).enumerate() {
            if l > u {
                return Err(Error::InvalidParameter(format!("bracket inverted at node {i}: {l} > {u}")));
            }
            if mesh.is_boundary(i) && (*l > 0.0 || *u < 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "bracket at boundary node {i} does not contain 0"
                )));
            }
        }
        Ok(SubSuperPair { lower, upper })
    }

    /// Constant bracket `[lo, hi]` in the interior with zero boundary values.
    pub fn constant(mesh: Arc<Mesh>, lo: f64, hi: f64) -> Result<Self> {
        let lower = DiscreteField::from_fn(mesh.clone(), |_| lo);
        let upper = DiscreteField::from_fn(mesh, |_| hi);
        let zero_bd = |f: DiscreteField| {
            let mesh = f.mesh().clone();
            let mut v = f.into_values();
            for n in mesh.boundary_nodes() {
                v[n] = 0.0;
            }
            DiscreteField::new(mesh, v)
        };
        Self::new(zero_bd(lower)?, zero_bd(upper)?)
    }

    pub fn lower(&self) -> &DiscreteField {
        &self.lower
    }

    pub fn upper(&self) -> &DiscreteField {
        &self.upper
    }

    /// `M = max(|u̲|_∞, |u̅|_∞)`.
    pub fn bound(&self) -> f64 {
        self.lower.sup_norm().max(self.upper.sup_norm())
    }

    /// `u̲ ≤ u ≤ u̅` at every node.
    pub fn contains(&self, u: &DiscreteField) -> bool {
        u.values()
            .iter()
            .zip(self.lower.values().iter().zip(self.upper.values()))
            .all(|(v, (l, h))| l <= v && v <= h)
    }

    /// Midpoint `(u̲ + u̅)/2` with zero boundary values.
    pub fn midpoint(&self) -> DiscreteField {
        let mesh = self.lower.mesh().clone();
        let values = (0..mesh.node_count())
            .map(|i| {
                if mesh.is_boundary(i) {
                    0.0
                } else {
                    0.5 * (self.lower.values()[i] + self.upper.values()[i])
                }
            })
            .collect();
        DiscreteField::new(mesh, values).expect("midpoint of finite fields")
    }

    /// Clamp `values` into the bracket, returning the largest adjustment.
    fn clamp(&self, values: &mut [f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for ((v, l), u) in values.iter_mut().zip(self.lower.values()).zip(self.upper.values()) {
            let c = v.clamp(*l, *u);
            worst = worst.max((c - *v).abs());
            *v = c;
        }
        worst
    }

    fn mirrored(&self) -> Self {
        let neg = |f: &DiscreteField| {
            DiscreteField::new(f.mesh().clone(), f.values().iter().map(|v| -v).collect()).expect("finite")
        };
        SubSuperPair {
            lower: neg(&self.upper),
            upper: neg(&self.lower),
        }
    }
}

/// Everything `solve_problem` needs.
#[derive(Debug, Clone)]
pub struct Problem {
    pub op: ALaplacian,
    pub mesh: Arc<Mesh>,
    pub convection: ConvectionTerm,
    pub bracket: SubSuperPair,
    pub settings: SolverSettings,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    #[serde(skip)]
    pub solution: Option<DiscreteField>,
    pub converged: bool,
    pub outer_iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub radius: f64,
    pub escalations: usize,
    pub max_gradient: f64,
    /// Largest clamp adjustment in the last outer step.
    pub bracket_violation: f64,
    pub radius_active: bool,
    /// Truncation changed some load value at some point of the final run.
    pub truncation_used: bool,
    pub bracket_active: bool,
    pub relaxation: f64,
    pub newton_iterations: usize,
    pub max_abs_convection: f64,
    /// `max σ + a A'(R) R` over the nodes, when growth data is declared.
    pub convection_cap: Option<f64>,
}

impl SolveReport {
    pub fn solution(&self) -> &DiscreteField {
        self.solution.as_ref().expect("report carries a solution")
    }
}

fn nodal_load(problem: &Problem, u: &DiscreteField, radius: f64, report: &mut SolveReport) -> Vec<f64> {
    let mesh = &problem.mesh;
    let dim = mesh.dim();
    let fr = truncate_convection(&problem.convection, radius, &problem.op);
    let grads = u.nodal_gradients();
    (0..mesh.node_count())
        .map(|i| {
            let x = mesh.coords(i);
            let xi = &grads[i][..dim];
            let v = fr.eval(x, u.values()[i], xi);
            if crate::operator::norm(xi) > radius {
                report.truncation_used = true;
            }
            report.max_abs_convection = report.max_abs_convection.max(v.abs());
            if let Some(cap) = fr.cap_bound(x) {
                let c = report.convection_cap.get_or_insert(cap);
                *c = c.max(cap);
            }
            v
        })
        .collect()
}

fn picard(problem: &Problem, u0: &DiscreteField, radius: f64) -> (SolveReport, Option<Error>) {
    let s = &problem.settings;
    let mut report = SolveReport {
        solution: None,
        converged: false,
        outer_iterations: 0,
        residual: f64::INFINITY,
        residual_history: Vec::new(),
        radius,
        escalations: 0,
        max_gradient: 0.0,
        bracket_violation: 0.0,
        radius_active: false,
        truncation_used: false,
        bracket_active: false,
        relaxation: 1.0,
        newton_iterations: 0,
        max_abs_convection: 0.0,
        convection_cap: None,
    };
    let mut u = u0.clone();
    let mut theta = 1.0;
    let mut failure = None;
    for k in 1..=s.max_outer {
        report.outer_iterations = k;
        let load = nodal_load(problem, &u, radius, &mut report);
        let v = match solve_frozen(&problem.op, &load, &u, s) {
            Ok((v, stats)) => {
                report.newton_iterations += stats.newton_iterations;
                v
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        };
        let mut next: Vec<f64> = v
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| theta * a + (1.0 - theta) * b)
            .collect();
        report.bracket_violation = problem.bracket.clamp(&mut next);
        let res = next
            .iter()
            .zip(u.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        if res > report.residual && theta > s.min_relaxation {
            theta = (0.5 * theta).max(s.min_relaxation);
        }
        report.residual = res;
        report.residual_history.push(res);
        u = DiscreteField::new(problem.mesh.clone(), next).expect("finite iterate");
        if res < s.outer_tol {
            report.converged = true;
            break;
        }
    }
    report.relaxation = theta;
    report.max_gradient = u.max_gradient();
    report.radius_active = report.max_gradient >= radius;
    report.bracket_active = report.bracket_violation > 0.0;
    report.solution = Some(u);
    (report, failure)
}

/// Initial truncation radius for `problem`.
pub fn initial_radius(problem: &Problem) -> f64 {
    problem
        .settings
        .initial_radius
        .unwrap_or_else(|| 2.0 * problem.bracket.midpoint().max_gradient().max(1.0))
}

/// Run the outer iteration from the bracket midpoint, doubling `R` while
/// the measured gradient reaches it.
pub fn solve_problem(problem: &Problem) -> Result<SolveReport> {
    problem.settings.validate()?;
    if problem.op.dim() != problem.mesh.dim() {
        return Err(Error::InvalidParameter("operator and mesh dimensions differ".into()));
    }
    let u0 = problem.bracket.midpoint();
    let mut radius = initial_radius(problem);
    for esc in 0..=problem.settings.max_escalations {
        let (mut report, failure) = picard(problem, &u0, radius);
        report.escalations = esc;
        if report.converged && !report.radius_active {
            return Ok(report);
        }
        if !report.radius_active {
            let reason = match failure {
                Some(e) => format!("frozen solve failed: {e}"),
                None => format!(
                    "no convergence after {} outer iterations (residual {:e})",
                    report.outer_iterations, report.residual
                ),
            };
            return Err(Error::NotConverged {
                reason,
                report: Box::new(report),
            });
        }
        if esc == problem.settings.max_escalations {
            return Err(Error::NotConverged {
                reason: format!("gradient reached R = {radius} after {esc} escalations"),
                report: Box::new(report),
            });
        }
        radius *= 2.0;
    }
    unreachable!()
}

/// The reflected problem with `f₁(x, s, ξ) = -f(x, -s, -ξ)` and bracket
/// `[-u̅, -u̲]`. Its solutions are the negatives of the original ones.
pub fn mirror_problem(problem: &Problem) -> Problem {
    Problem {
        op: problem.op.clone(),
        mesh: problem.mesh.clone(),
        convection: problem.convection.mirrored(),
        bracket: problem.bracket.mirrored(),
        settings: problem.settings.clone(),
    }
}

/// Solve `-Δ_A u = ρ₁(x) + g₁(|u|)` by Picard iteration from `u ≡ 0`. The
/// iterates increase monotonically for nondecreasing `g₁`.
pub fn auxiliary_supersolution(
    op: &ALaplacian,
    mesh: Arc<Mesh>,
    rho1: &XFunc,
    g1: &SFunc,
    settings: &SolverSettings,
) -> Result<DiscreteField> {
    let mut u = DiscreteField::zeros(mesh.clone());
    for _ in 0..settings.max_outer {
        let load: Vec<f64> = (0..mesh.node_count())
            .map(|i| rho1(mesh.coords(i)) + g1(u.values()[i].abs()))
            .collect();
        let (v, _) = solve_frozen(op, &load, &u, settings)?;
        let res = v
            .values()
            .iter()
            .zip(u.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        u = v;
        if res < settings.outer_tol {
            return Ok(u);
        }
    }
    Err(Error::NotConverged {
        reason: "auxiliary supersolution iteration did not settle".into(),
        report: Box::new(SolveReport {
            solution: Some(u),
            converged: false,
            outer_iterations: settings.max_outer,
            residual: f64::NAN,
            residual_history: Vec::new(),
            radius: f64::INFINITY,
            escalations: 0,
            max_gradient: 0.0,
            bracket_violation: 0.0,
            radius_active: false,
            truncation_used: false,
            bracket_active: false,
            relaxation: 1.0,
            newton_iterations: 0,
            max_abs_convection: 0.0,
            convection_cap: None,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_mesh, Domain};
    use crate::youngfn::{make_young, Family};

    fn interval(h: f64) -> Arc<Mesh> {
        Arc::new(build_mesh(Domain::Interval { lo: -1.0, hi: 1.0 }, h).unwrap())
    }

    fn problem(f: ConvectionTerm, p: f64, lo: f64, hi: f64, h: f64) -> Problem {
        let mesh = interval(h);
        Problem {
            op: ALaplacian::new(make_young(Family::Power { p }).unwrap(), 1).unwrap(),
            bracket: SubSuperPair::constant(mesh.clone(), lo, hi).unwrap(),
            mesh,
            convection: f,
            settings: SolverSettings::default(),
        }
    }

    #[test]
    fn zero_convection_gives_zero() {
        let r = solve_problem(&problem(ConvectionTerm::zero(), 2.0, -1.0, 1.0, 0.1)).unwrap();
        assert!(r.converged);
        assert!(r.solution().sup_norm() < 1e-12);
        assert!(r.outer_iterations <= 2);
    }

    #[test]
    fn bracket_rejects_inverted() {
        let mesh = interval(0.5);
        assert!(SubSuperPair::constant(mesh.clone(), 1.0, -1.0).is_err());
        let lower = DiscreteField::constant(mesh.clone(), 0.5);
        assert!(SubSuperPair::new(lower, DiscreteField::constant(mesh, 1.0)).is_err());
    }

    #[test]
    fn implicit_reaction_matches_direct_solve() {
        // -u'' = 1 - u on (-1, 1) with lumped mass is linear: (K + M) u = M 1.
        let f = ConvectionTerm::new("1-s", |_, s, _| 1.0 - s);
        let pr = problem(f, 2.0, 0.0, 1.0, 1.0 / 32.0);
        let r = solve_problem(&pr).unwrap();
        let mesh = &pr.mesh;
        let n = mesh.interior_nodes().len();
        let h = mesh.h();
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 2.0 / h + h));
            if i + 1 < n {
                trip.push((i, i + 1, -1.0 / h));
                trip.push((i + 1, i, -1.0 / h));
            }
        }
        let k = crate::discretize::SparseSym::from_triplets(n, &trip).unwrap();
        let direct = k.solve(&vec![h; n]).unwrap();
        for (k, &node) in mesh.interior_nodes().iter().enumerate() {
            assert!((r.solution().values()[node] - direct[k]).abs() < 1e-7);
        }
    }

    #[test]
    fn auxiliary_torsion() {
        let mesh = interval(1.0 / 32.0);
        let op = ALaplacian::new(make_young(Family::Power { p: 2.0 }).unwrap(), 1).unwrap();
        let rho: XFunc = Arc::new(|_| 1.0);
        let g: SFunc = Arc::new(|_| 0.0);
        let u = auxiliary_supersolution(&op, mesh.clone(), &rho, &g, &SolverSettings::default()).unwrap();
        for i in 0..mesh.node_count() {
            let x = mesh.point(i)[0];
            assert!((u.values()[i] - 0.5 * (1.0 - x * x)).abs() < 1e-9);
        }
    }
}
