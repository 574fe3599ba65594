#[cfg(feature = "parallel")]
use rayon::prelude::*;

use super::field::cell_gradient;
use super::{DiscreteField, Mesh, SparseSym};
use crate::operator::ALaplacian;
use crate::{Error, Result};

/// Energy, gradient and Hessian of
/// `J(v) = Σ_c |c| A(|∇v_c|) - Σ_i m_i f_i v_i`
/// with respect to the interior nodal values.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub energy: f64,
    pub gradient: Vec<f64>,
    pub hessian: SparseSym,
    /// Regularization length used in the Hessian.
    pub epsilon: f64,
}

/// Hessian regularization length `1e-8 max(max_c |∇u_c|, 1)`.
pub fn regularization_for(u: &DiscreteField) -> f64 {
    1e-8 * u.max_gradient().max(1.0)
}

struct Local {
    energy: f64,
    grad: [f64; 3],
    hess: [[f64; 3]; 3],
}

fn local(op: &ALaplacian, mesh: &Mesh, values: &[f64], c: usize, epsilon: f64, with_hessian: bool) -> Local {
    let dim = mesh.dim();
    let g = cell_gradient(mesh, values, c);
    let eta = &g[..dim];
    let vol = mesh.cell_volume(c);
    let a = op.young();
    let r = crate::operator::norm(eta);
    let phis = mesh.cell_shape_grads(c);
    let k = phis.len();
    let mut out = Local {
        energy: vol * a.value(r),
        grad: [0.0; 3],
        hess: [[0.0; 3]; 3],
    };
    if r > 0.0 {
        let scale = vol * a.deriv1(r) / r;
        for (i, phi) in phis.iter().enumerate() {
            out.grad[i] = scale * (0..dim).map(|d| eta[d] * phi[d]).sum::<f64>();
        }
    }
    if with_hessian {
        let mut h = [0.0; 4];
        op.hessian_into(eta, epsilon, &mut h[..dim * dim]);
        for i in 0..k {
            for j in 0..k {
                let mut s = 0.0;
                for a_ in 0..dim {
                    for b in 0..dim {
                        s += phis[i][a_] * h[a_ * dim + b] * phis[j][b];
                    }
                }
                out.hess[i][j] = vol * s;
            }
        }
    }
    out
}

fn locals(op: &ALaplacian, u: &DiscreteField, epsilon: f64, with_hessian: bool, parallel: bool) -> Vec<Local> {
    let mesh = u.mesh();
    let values = u.values();
    let f = |c: usize| local(op, mesh, values, c, epsilon, with_hessian);
    #[cfg(feature = "parallel")]
    if parallel {
        return (0..mesh.cell_count()).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..mesh.cell_count()).map(f).collect()
}

fn check_load(mesh: &Mesh, load: &[f64]) -> Result<()> {
    if load.len() != mesh.node_count() {
        return Err(Error::InvalidParameter(format!(
            "load has {} entries, mesh has {} nodes",
            load.len(),
            mesh.node_count()
        )));
    }
    Ok(())
}

fn load_term(mesh: &Mesh, load: &[f64], values: &[f64]) -> f64 {
    (0..mesh.node_count())
        .map(|i| mesh.lumped_mass(i) * load[i] * values[i])
        .sum()
}

fn finite(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(what.into()))
    }
}

/// `J(u)` for nodal load values `load`.
pub fn energy(op: &ALaplacian, load: &[f64], u: &DiscreteField) -> Result<f64> {
    let mesh = u.mesh();
    check_load(mesh, load)?;
    let values = u.values();
    let principal: f64 = (0..mesh.cell_count())
        .map(|c| {
            let g = cell_gradient(mesh, values, c);
            mesh.cell_volume(c) * op.young().value(crate::operator::norm(&g[..mesh.dim()]))
        })
        .sum();
    finite(principal - load_term(mesh, load, values), "energy")
}

/// Weak residual `∫ A'(|∇u|) ∇u/|∇u| · ∇φ_i - m_i f_i` for the hat function
/// of every node, boundary nodes included. Unregularized.
pub fn nodal_residual(op: &ALaplacian, load: &[f64], u: &DiscreteField) -> Result<Vec<f64>> {
    let mesh = u.mesh();
    check_load(mesh, load)?;
    let locals = locals(op, u, 0.0, false, cfg!(feature = "parallel"));
    let mut r: Vec<f64> = (0..mesh.node_count()).map(|i| -mesh.lumped_mass(i) * load[i]).collect();
    for (c, l) in locals.iter().enumerate() {
        for (k, &n) in mesh.cell(c).iter().enumerate() {
            r[n] += l.grad[k];
        }
    }
    for v in &r {
        finite(*v, "residual")?;
    }
    Ok(r)
}

/// Assemble with the default regularization, in parallel when the
/// `parallel` feature is on.
pub fn assemble(op: &ALaplacian, load: &[f64], u: &DiscreteField) -> Result<AssembledSystem> {
    let eps = regularization_for(u).max(op.epsilon_reg());
    assemble_with(op, load, u, eps, true)
}

pub fn assemble_serial(op: &ALaplacian, load: &[f64], u: &DiscreteField) -> Result<AssembledSystem> {
    let eps = regularization_for(u).max(op.epsilon_reg());
    assemble_with(op, load, u, eps, false)
}

/// Assemble with an explicit Hessian regularization length. Local cell
/// contributions may be computed in parallel but are always summed in cell
/// order, so the result does not depend on `parallel`.
pub fn assemble_with(
    op: &ALaplacian,
    load: &[f64],
    u: &DiscreteField,
    epsilon: f64,
    parallel: bool,
) -> Result<AssembledSystem> {
    let mesh = u.mesh();
    check_load(mesh, load)?;
    if op.dim() != mesh.dim() {
        return Err(Error::InvalidParameter("operator and mesh dimensions differ".into()));
    }
    let values = u.values();
    let locals = locals(op, u, epsilon, true, parallel);
    let ndof = mesh.interior_nodes().len();
    let mut gradient = vec![0.0; ndof];
    let mut triplets = Vec::with_capacity(locals.len() * 9);
    let mut principal = 0.0;
    for (c, l) in locals.iter().enumerate() {
        principal += l.energy;
        let nodes = mesh.cell(c);
        for (i, &ni) in nodes.iter().enumerate() {
            let Some(di) = mesh.dof(ni) else { continue };
            gradient[di] += l.grad[i];
            for (j, &nj) in nodes.iter().enumerate() {
                if let Some(dj) = mesh.dof(nj) {
                    triplets.push((di, dj, l.hess[i][j]));
                }
            }
        }
    }
    for (k, &n) in mesh.interior_nodes().iter().enumerate() {
        gradient[k] -= mesh.lumped_mass(n) * load[n];
    }
    let energy = finite(principal - load_term(mesh, load, values), "energy")?;
    if gradient.iter().any(|g| !g.is_finite()) || triplets.iter().any(|t| !t.2.is_finite()) {
        return Err(Error::NonFinite("assembled gradient or Hessian".into()));
    }
    Ok(AssembledSystem {
        energy,
        gradient,
        hessian: SparseSym::from_triplets(ndof, &triplets)?,
        epsilon,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_mesh, Domain};
    use crate::youngfn::{make_young, Family};
    use std::sync::Arc;

    fn quad_op(dim: usize) -> ALaplacian {
        ALaplacian::new(make_young(Family::Power { p: 2.0 }).unwrap(), dim).unwrap()
    }

    #[test]
    fn zero_field_zero_energy() {
        let m = Arc::new(build_mesh(Domain::Interval { lo: -1.0, hi: 1.0 }, 0.25).unwrap());
        let u = DiscreteField::zeros(m.clone());
        let s = assemble(&quad_op(1), &vec![0.0; m.node_count()], &u).unwrap();
        assert_eq!(s.energy, 0.0);
        assert!(s.gradient.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn quadratic_gradient_is_stiffness_action() {
        // h = 0.5 on (-1, 1): interior nodes -0.5, 0, 0.5.
        let m = Arc::new(build_mesh(Domain::Interval { lo: -1.0, hi: 1.0 }, 0.5).unwrap());
        let u = DiscreteField::new(m.clone(), vec![0.0, 0.3, -0.2, 0.7, 0.0]).unwrap();
        let load = vec![1.0; 5];
        let s = assemble(&quad_op(1), &load, &u).unwrap();
        let v = [0.0, 0.3, -0.2, 0.7, 0.0];
        for i in 1..4 {
            let expect = (-v[i - 1] + 2.0 * v[i] - v[i + 1]) / 0.5 - 0.5;
            assert!((s.gradient[i - 1] - expect).abs() < 1e-14);
        }
        assert!((s.hessian.get(0, 0) - 4.0).abs() < 1e-14);
        assert!((s.hessian.get(0, 1) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn residual_matches_gradient_on_interior() {
        let m = Arc::new(build_mesh(Domain::Rectangle { lo: [0.0, 0.0], hi: [1.0, 1.0] }, 0.25).unwrap());
        let op = ALaplacian::new(make_young(Family::PowerSum { p: 3.0, q: 1.5 }).unwrap(), 2).unwrap();
        let u = DiscreteField::from_fn(m.clone(), |x| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]));
        let load: Vec<f64> = (0..m.node_count()).map(|i| m.point(i)[0]).collect();
        let s = assemble(&op, &load, &u).unwrap();
        let r = nodal_residual(&op, &load, &u).unwrap();
        for (k, &n) in m.interior_nodes().iter().enumerate() {
            assert!((r[n] - s.gradient[k]).abs() < 1e-15);
        }
        assert!(s.hessian.asymmetry() < 1e-15);
    }

    #[test]
    fn wrong_load_length() {
        let m = Arc::new(build_mesh(Domain::Interval { lo: 0.0, hi: 1.0 }, 0.25).unwrap());
        let u = DiscreteField::zeros(m);
        assert!(assemble(&quad_op(1), &[0.0; 2], &u).is_err());
    }
}
