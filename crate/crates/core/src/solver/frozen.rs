use serde::Serialize;

use super::SolverSettings;
use crate::discretize::{assemble_with, energy, regularization_for, DiscreteField};
use crate::operator::ALaplacian;
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct FrozenStats {
    pub newton_iterations: usize,
    pub gradient_norm: f64,
    pub energy: f64,
    pub initial_energy: f64,
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn with_interior(init: &DiscreteField, base: &[f64], dir: &[f64], alpha: f64) -> Result<DiscreteField> {
    let mesh = init.mesh();
    let mut values = base.to_vec();
    for (k, &n) in mesh.interior_nodes().iter().enumerate() {
        values[n] += alpha * dir[k];
    }
    DiscreteField::new(mesh.clone(), values)
}

/// Minimize `J(v) = ∫ A(|∇v|) - Σ m_i load_i v_i` over fields with the
/// boundary trace of `init`, by damped Newton with Armijo backtracking.
///
/// Close to the minimizer the predicted energy decrease drops below the
/// rounding level of `J`; steps are then accepted when they reduce the
/// gradient sup-norm.
pub fn solve_frozen(
    op: &ALaplacian,
    load: &[f64],
    init: &DiscreteField,
    settings: &SolverSettings,
) -> Result<(DiscreteField, FrozenStats)> {
    let parallel = settings.parallel;
    let mut u = init.clone();
    let eps = |u: &DiscreteField| regularization_for(u).max(op.epsilon_reg());
    let mut sys = assemble_with(op, load, &u, eps(&u), parallel)?;
    let initial_energy = sys.energy;
    let mut gnorm = sup(&sys.gradient);
    let mut iterations = 0;
    while gnorm >= settings.inner_tol {
        if iterations == settings.max_newton {
            return Err(Error::NewtonNotConverged {
                iterations,
                residual: gnorm,
            });
        }
        iterations += 1;
        let rhs: Vec<f64> = sys.gradient.iter().map(|g| -g).collect();
        let mut dir = sys.hessian.solve(&rhs)?;
        let mut slope: f64 = dir.iter().zip(&sys.gradient).map(|(d, g)| d * g).sum();
        if !(slope < 0.0) {
            dir = rhs;
            slope = -dir.iter().map(|d| d * d).sum::<f64>();
        }
        let base = u.values().to_vec();
        let resolution = 1e-12 * sys.energy.abs().max(1.0);
        let mut alpha = 1.0;
        let mut next = None;
        for _ in 0..settings.max_backtracks {
            let trial = with_interior(&u, &base, &dir, alpha)?;
            if -slope * alpha > resolution {
                if let Ok(j) = energy(op, load, &trial) {
                    if j <= sys.energy + settings.armijo * alpha * slope {
                        let s = assemble_with(op, load, &trial, eps(&trial), parallel)?;
                        next = Some((trial, s));
                        break;
                    }
                }
            } else if let Ok(s) = assemble_with(op, load, &trial, eps(&trial), parallel) {
                // Energy decrease below rounding: judge the step by the
                // gradient instead.
                if sup(&s.gradient) < gnorm {
                    next = Some((trial, s));
                    break;
                }
            }
            alpha *= settings.backtrack;
        }
        let Some((t, s)) = next else {
            return Err(Error::LineSearch {
                iteration: iterations,
                residual: gnorm,
            });
        };
        u = t;
        sys = s;
        gnorm = sup(&sys.gradient);
    }
    Ok((
        u,
        FrozenStats {
            newton_iterations: iterations,
            gradient_norm: gnorm,
            energy: sys.energy,
            initial_energy,
        },
    ))
}
