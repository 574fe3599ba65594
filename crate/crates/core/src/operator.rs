//! The A-Laplacian `div(A'(|∇u|) ∇u/|∇u|)` as the gradient of
//! `Φ(ξ) = A(|ξ|)`, with its Hessian and structure constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::youngfn::{estimate_index_bounds, IndexBounds, LogGrid, YoungFunction};
use crate::{Error, Result};

/// Pass threshold for relative structure margins.
pub const STRUCTURE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ALaplacian {
    young: YoungFunction,
    bounds: IndexBounds,
    dim: usize,
    epsilon_reg: f64,
}

impl ALaplacian {
    /// Operator in dimension `dim`. Built-in families use their closed-form
    /// index bounds, custom functions the estimate on the standard grid.
    pub fn new(young: YoungFunction, dim: usize) -> Result<Self> {
        let bounds = match young.analytic_bounds() {
            Some(b) => b,
            None => estimate_index_bounds(&young, &LogGrid::default_for(&young))?,
        };
        Self::with_bounds(young, bounds, dim)
    }

    pub fn with_bounds(young: YoungFunction, bounds: IndexBounds, dim: usize) -> Result<Self> {
        bounds.validate()?;
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        Ok(ALaplacian {
            young,
            bounds,
            dim,
            epsilon_reg: 0.0,
        })
    }

    /// Set the regularization length used by [`ALaplacian::flux`] and
    /// [`ALaplacian::hessian`].
    pub fn with_regularization(mut self, epsilon: f64) -> Self {
        self.epsilon_reg = epsilon.max(0.0);
        self
    }

    pub fn young(&self) -> &YoungFunction {
        &self.young
    }

    pub fn bounds(&self) -> &IndexBounds {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn epsilon_reg(&self) -> f64 {
        self.epsilon_reg
    }

    /// `min{δ, 1}`.
    pub fn ellipticity(&self) -> f64 {
        self.bounds.ellipticity()
    }

    /// `λ = 2 max{|δ-1|, |g₀-1|} + n`.
    pub fn lambda_struct(&self) -> f64 {
        2.0 * (self.bounds.delta - 1.0).abs().max((self.bounds.g0 - 1.0).abs()) + self.dim as f64
    }

    /// `Λ = λ / min{δ, 1}`.
    pub fn big_lambda(&self) -> f64 {
        self.lambda_struct() / self.ellipticity()
    }

    /// `g(t) = min{δ, 1} A'(t)`.
    pub fn g_floor(&self, t: f64) -> f64 {
        self.ellipticity() * self.young.deriv1(t)
    }

    /// `Φ(η) = A(|η|)`.
    pub fn potential(&self, eta: &[f64]) -> f64 {
        self.young.value(norm(eta))
    }

    /// `A'(|η|) η / |η|`, zero at the origin.
    pub fn flux(&self, eta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; eta.len()];
        self.flux_into(eta, &mut out);
        out
    }

    pub(crate) fn flux_into(&self, eta: &[f64], out: &mut [f64]) {
        let r = norm(eta);
        let denom = if self.epsilon_reg > 0.0 {
            r.hypot(self.epsilon_reg)
        } else {
            r
        };
        if r < f64::MIN_POSITIVE || denom < f64::MIN_POSITIVE {
            out.iter_mut().for_each(|o| *o = 0.0);
            return;
        }
        let scale = self.young.deriv1(r) / denom;
        for (o, e) in out.iter_mut().zip(eta) {
            *o = scale * e;
        }
    }

    /// `∂_ij Φ(η)`, row-major `n × n`. Requires `η ≠ 0` unless the operator
    /// carries a positive regularization length.
    pub fn hessian(&self, eta: &[f64]) -> Result<Vec<f64>> {
        if norm(eta) == 0.0 && self.epsilon_reg == 0.0 {
            return Err(Error::SingularPoint);
        }
        let n = eta.len();
        let mut out = vec![0.0; n * n];
        self.hessian_into(eta, self.epsilon_reg, &mut out);
        Ok(out)
    }

    /// Hessian with `|η|` replaced by `ρ = sqrt(|η|² + ε²)`:
    /// `A''(ρ) ηηᵀ/ρ² + A'(ρ)/ρ (I - ηηᵀ/ρ²)`. Exact for `ε = 0`.
    pub(crate) fn hessian_into(&self, eta: &[f64], epsilon: f64, out: &mut [f64]) {
        let n = eta.len();
        let rho = norm(eta).hypot(epsilon);
        let a1 = self.young.deriv1(rho) / rho;
        let a2 = self.young.deriv2(rho);
        let rho2 = rho * rho;
        for i in 0..n {
            for j in 0..n {
                let outer = eta[i] * eta[j] / rho2;
                let id = if i == j { 1.0 } else { 0.0 };
                out[i * n + j] = a2 * outer + a1 * (id - outer);
            }
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    match v.len() {
        1 => v[0].abs(),
        2 => v[0].hypot(v[1]),
        _ => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
    }
}

/// Worst relative margins of the ellipticity and growth inequalities over a
/// sample set.
#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub samples: usize,
    /// `Σ ∂_ijΦ ξ_i ξ_j ≥ min{δ,1} A'(|η|)/|η| |ξ|²`.
    pub margin_ellipticity: f64,
    /// `Σ |∂_ijΦ| ≤ λ A'(|η|)/|η|`.
    pub margin_growth: f64,
    /// The flux has no explicit `x` or `u` dependence, so the Hölder
    /// continuity condition holds with any constant.
    pub continuity_vacuous: bool,
    /// `|f| ≤ Λ₁(1 + g(|ξ|)|ξ|)` when a convection bound was checked.
    pub margin_convection: Option<f64>,
    pub pass_ellipticity: bool,
    pub pass_growth: bool,
    pub pass_convection: Option<bool>,
    pub passed: bool,
}

impl StructureReport {
    /// Fold a convection bound check into the report.
    pub fn with_convection_margin(mut self, margin: f64) -> Self {
        let pass = margin >= -STRUCTURE_TOLERANCE;
        self.margin_convection = Some(margin);
        self.pass_convection = Some(pass);
        self.passed = self.passed && pass;
        self
    }
}

/// Check both Hessian inequalities at every `(η, ξ)` sample with the exact
/// constants `min{δ,1}` and `λ`. Margins are relative to the right-hand
/// scale `A'(|η|)/|η|`.
pub fn verify_structure(op: &ALaplacian, samples: &[(Vec<f64>, Vec<f64>)]) -> StructureReport {
    let n = op.dim();
    let mut hess = vec![0.0; n * n];
    let mut worst_a = f64::INFINITY;
    let mut worst_b = f64::INFINITY;
    let mut count = 0;
    for (eta, xi) in samples {
        let r = norm(eta);
        if r == 0.0 || eta.len() != n || xi.len() != n {
            continue;
        }
        count += 1;
        op.hessian_into(eta, 0.0, &mut hess);
        let scale = op.young().deriv1(r) / r;
        let xi2: f64 = xi.iter().map(|x| x * x).sum();
        if xi2 > 0.0 {
            let mut quad = 0.0;
            for i in 0..n {
                for j in 0..n {
                    quad += hess[i * n + j] * xi[i] * xi[j];
                }
            }
            let rhs = op.ellipticity() * scale * xi2;
            worst_a = worst_a.min((quad - rhs) / (scale * xi2));
        }
        let abs_sum: f64 = hess.iter().map(|h| h.abs()).sum();
        let bound = op.lambda_struct() * scale;
        worst_b = worst_b.min((bound - abs_sum) / bound);
    }
    let pass_a = worst_a >= -STRUCTURE_TOLERANCE;
    let pass_b = worst_b >= -STRUCTURE_TOLERANCE;
    StructureReport {
        samples: count,
        margin_ellipticity: worst_a,
        margin_growth: worst_b,
        continuity_vacuous: true,
        margin_convection: None,
        pass_ellipticity: pass_a,
        pass_growth: pass_b,
        pass_convection: None,
        passed: pass_a && pass_b && count > 0,
    }
}

/// Worst relative margin of `|f| ≤ Λ₁ (1 + g(|ξ|)|ξ|)` over `(f value, |ξ|)`
/// pairs.
pub fn convection_bound_margin<I>(op: &ALaplacian, lambda1: f64, values: I) -> f64
where
    I: IntoIterator<Item = (f64, f64)>,
{
    values
        .into_iter()
        .map(|(f, xi)| {
            let bound = lambda1 * (1.0 + op.g_floor(xi) * xi);
            (bound - f.abs()) / bound.max(1.0)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Random `(η, ξ)` pairs: half uniform in `[-range, range]^{2n}`, half with
/// log-uniform `|η| ∈ [1e-6, 1e6]` in a random direction.
pub fn random_structure_samples(dim: usize, count: usize, range: f64, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let xi: Vec<f64> = (0..dim).map(|_| rng.gen_range(-range..=range)).collect();
        let mut eta: Vec<f64> = (0..dim).map(|_| rng.gen_range(-range..=range)).collect();
        if out.len() % 2 == 1 {
            let r = norm(&eta);
            if r == 0.0 {
                continue;
            }
            let mag = 10f64.powf(rng.gen_range(-6.0..=6.0));
            eta.iter_mut().for_each(|e| *e *= mag / r);
        }
        if norm(&eta) > 0.0 {
            out.push((eta, xi));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::youngfn::{make_young, Family, LogSign};

    fn op(f: Family, dim: usize) -> ALaplacian {
        ALaplacian::new(make_young(f).unwrap(), dim).unwrap()
    }

    #[test]
    fn quadratic_flux_is_identity() {
        let o = op(Family::Power { p: 2.0 }, 2);
        let f = o.flux(&[3.0, 4.0]);
        assert!((f[0] - 3.0).abs() < 1e-14 && (f[1] - 4.0).abs() < 1e-14);
        let h = o.hessian(&[0.3, -2.0]).unwrap();
        for (k, v) in h.iter().enumerate() {
            let expect = if k == 0 || k == 3 { 1.0 } else { 0.0 };
            assert!((v - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn flux_vanishes_at_origin() {
        for f in [Family::Power { p: 1.5 }, Family::PowerSum { p: 3.0, q: 1.2 }] {
            let o = op(f, 2);
            assert_eq!(o.flux(&[0.0, 0.0]), vec![0.0, 0.0]);
            assert_eq!(o.clone().with_regularization(1e-3).flux(&[0.0, 0.0]), vec![0.0, 0.0]);
        }
    }

    #[test]
    fn cubic_flux_and_hessian() {
        let o = op(Family::Power { p: 3.0 }, 2);
        assert_eq!(o.flux(&[1.0, 0.0]), vec![1.0, 0.0]);
        let h = o.hessian(&[1.0, 0.0]).unwrap();
        assert!((h[0] - 2.0).abs() < 1e-14 && (h[3] - 1.0).abs() < 1e-14);
        assert!(h[1].abs() < 1e-14 && h[2].abs() < 1e-14);
    }

    #[test]
    fn hessian_at_zero_needs_regularization() {
        let o = op(Family::Power { p: 3.0 }, 2);
        assert!(matches!(o.hessian(&[0.0, 0.0]), Err(Error::SingularPoint)));
        let h = o.with_regularization(1e-4).hessian(&[0.0, 0.0]).unwrap();
        assert!(h[0] > 0.0 && (h[0] - h[3]).abs() < 1e-18);
    }

    #[test]
    fn structure_constants() {
        let o = op(Family::PowerSum { p: 3.0, q: 2.0 }, 2);
        assert_eq!(o.ellipticity(), 1.0);
        assert_eq!(o.lambda_struct(), 4.0);
        assert_eq!(o.big_lambda(), 4.0);
        let o = op(Family::PowerLog { p: 3.0, q: 0.5, sign: LogSign::Minus }, 1);
        assert_eq!(o.bounds().delta, 1.5);
        assert_eq!(o.ellipticity(), 1.0);
        let o = op(Family::PowerSum { p: 3.0, q: 1.5 }, 3);
        assert_eq!(o.ellipticity(), 0.5);
        assert_eq!(o.lambda_struct(), 2.0 * 1.0 + 3.0);
        assert_eq!(o.big_lambda(), 10.0);
    }

    #[test]
    fn quadratic_ellipticity_margin_is_zero() {
        let o = op(Family::Power { p: 2.0 }, 2);
        let r = verify_structure(&o, &random_structure_samples(2, 200, 10.0, 1));
        assert!(r.passed);
        assert!(r.margin_ellipticity.abs() < 1e-12);
    }

    #[test]
    fn convection_margin_detects_violation() {
        let o = op(Family::Power { p: 2.0 }, 1);
        let ok = convection_bound_margin(&o, 1.0, [(1.0, 0.0), (2.0, 1.0)]);
        assert!(ok >= 0.0);
        let bad = convection_bound_margin(&o, 1.0, [(5.0, 1.0)]);
        assert!(bad < 0.0);
    }
}
