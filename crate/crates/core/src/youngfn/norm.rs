use serde::Serialize;

use super::YoungLike;
use crate::discretize::DiscreteField;
use crate::{Error, Result};

const NORM_RTOL: f64 = 1e-12;

/// Midpoint rule `Σ_c |c| A(|u(x_c)|)`, with the P1 centroid value equal to
/// the cell mean of the nodal values.
pub fn modular<Y: YoungLike + ?Sized>(u: &DiscreteField, a: &Y) -> f64 {
    scaled_modular(u, a, 1.0)
}

fn scaled_modular<Y: YoungLike + ?Sized>(u: &DiscreteField, a: &Y, lambda: f64) -> f64 {
    let mesh = u.mesh();
    (0..mesh.cell_count())
        .map(|c| mesh.cell_volume(c) * a.eval(u.cell_mean(c).abs() / lambda))
        .sum()
}

/// `inf{λ > 0 : ∫ A(|u|/λ) ≤ 1}` by bisection on `λ`.
pub fn luxemburg_norm<Y: YoungLike + ?Sized>(u: &DiscreteField, a: &Y) -> Result<f64> {
    let scale = u.sup_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    let fits = |lambda: f64| scaled_modular(u, a, lambda) <= 1.0;
    let (mut lo, mut hi) = (scale, scale);
    let mut steps = 0;
    while !fits(hi) {
        hi *= 2.0;
        steps += 1;
        if steps > 2000 || !hi.is_finite() {
            return Err(Error::NonFinite("Luxemburg norm bracket diverged".into()));
        }
    }
    steps = 0;
    while fits(lo) {
        lo *= 0.5;
        steps += 1;
        if steps > 2000 || lo == 0.0 {
            return Ok(0.0);
        }
    }
    while hi - lo > NORM_RTOL * hi {
        let mid = 0.5 * (lo + hi);
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `∫ |uv|` with the same midpoint rule as [`modular`].
pub fn integral_abs_product(u: &DiscreteField, v: &DiscreteField) -> f64 {
    let mesh = u.mesh();
    (0..mesh.cell_count())
        .map(|c| mesh.cell_volume(c) * (u.cell_mean(c) * v.cell_mean(c)).abs())
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub norm_u: f64,
    pub norm_v: f64,
    /// `2 ‖u‖_A ‖v‖_Ã`.
    pub rhs: f64,
    pub passed: bool,
}

/// Compare `∫|uv|` against `2 ‖u‖_A ‖v‖_Ã`.
pub fn check_holder<A, C>(u: &DiscreteField, v: &DiscreteField, a: &A, conj: &C) -> Result<HolderReport>
where
    A: YoungLike + ?Sized,
    C: YoungLike + ?Sized,
{
    if u.values().len() != v.values().len() {
        return Err(Error::InvalidParameter("fields live on different meshes".into()));
    }
    let lhs = integral_abs_product(u, v);
    let norm_u = luxemburg_norm(u, a)?;
    let norm_v = luxemburg_norm(v, conj)?;
    let rhs = 2.0 * norm_u * norm_v;
    Ok(HolderReport {
        lhs,
        norm_u,
        norm_v,
        rhs,
        passed: lhs <= rhs * (1.0 + 1e-12),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretize::{build_mesh, Domain};
    use crate::youngfn::{conjugate, make_young, ConjugateGrid, Family};
    use std::sync::Arc;

    fn mesh() -> Arc<crate::discretize::Mesh> {
        Arc::new(build_mesh(Domain::Interval { lo: -1.0, hi: 1.0 }, 0.1).unwrap())
    }

    #[test]
    fn zero_field_has_zero_norm() {
        let a = make_young(Family::Power { p: 2.0 }).unwrap();
        assert_eq!(luxemburg_norm(&DiscreteField::zeros(mesh()), &a).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_quadratic() {
        // 2 (c/λ)² / 2 = 1 on (-1, 1) gives λ = c.
        let a = make_young(Family::Power { p: 2.0 }).unwrap();
        let u = DiscreteField::constant(mesh(), 0.7);
        let n = luxemburg_norm(&u, &a).unwrap();
        assert!((n - 0.7).abs() < 1e-10 * 0.7);
    }

    #[test]
    fn homogeneous() {
        let a = make_young(Family::PowerSum { p: 3.0, q: 1.5 }).unwrap();
        let u = DiscreteField::from_fn(mesh(), |x| (3.0 * x[0]).sin() + 0.2);
        let v = DiscreteField::from_fn(mesh(), |x| 2.5 * ((3.0 * x[0]).sin() + 0.2));
        let nu = luxemburg_norm(&u, &a).unwrap();
        let nv = luxemburg_norm(&v, &a).unwrap();
        assert!((nv - 2.5 * nu).abs() < 1e-10 * nv);
    }

    #[test]
    fn holder_on_constants() {
        let a = make_young(Family::Power { p: 2.0 }).unwrap();
        let conj = conjugate(&a, &ConjugateGrid::default()).unwrap();
        let one = DiscreteField::constant(mesh(), 1.0);
        let r = check_holder(&one, &one, &a, &conj).unwrap();
        assert!((r.lhs - 2.0).abs() < 1e-12);
        // Ã = A for the quadratic, so both norms equal 1.
        assert!((r.norm_v - 1.0).abs() < 1e-6);
        assert!(r.passed);
        let zero = DiscreteField::zeros(mesh());
        let r = check_holder(&zero, &zero, &a, &conj).unwrap();
        assert!(r.passed && r.lhs == 0.0 && r.rhs == 0.0);
    }
}
