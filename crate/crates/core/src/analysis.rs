//! Discrete verifiers for the growth hypotheses, the weak sub- and
//! supersolution inequalities, interior sign conclusions and the positivity
//! certificate chain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discretize::{nodal_residual, DiscreteField, Mesh};
use crate::operator::ALaplacian;
use crate::quad::integrate_unit_dyadic;
use crate::solver::{ConvectionTerm, SubSuperPair};
use crate::youngfn::{DoublingConstants, IndexBounds, YoungFunction};
use crate::{Error, Result};

pub use crate::solver::HypothesisH;

/// Pass threshold for relative margins.
pub const MARGIN_TOLERANCE: f64 = 1e-9;

/// Volume of the unit ball in dimension 1, 2 or 3.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => {
            let nf = n as f64;
            std::f64::consts::PI.powf(nf / 2.0) / gamma_half_int(n + 2)
        }
    }
}

/// `Γ(m/2)` for integer `m ≥ 1`.
fn gamma_half_int(m: usize) -> f64 {
    if m == 1 {
        std::f64::consts::PI.sqrt()
    } else if m == 2 {
        1.0
    } else {
        (m as f64 / 2.0 - 1.0) * gamma_half_int(m - 2)
    }
}

/// `ω_n^{1/n} |Ω|^{-1/n}`.
pub fn k1_upper_bound(dim: usize, measure: f64) -> f64 {
    (unit_ball_volume(dim) / measure).powf(1.0 / dim as f64)
}

fn log_samples(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub k1: f64,
    pub k1_bound: f64,
    pub k1_in_range: bool,
    /// Smallest sampled value of `ρ₁` and `ρ₂` at the nodes.
    pub rho_min: f64,
    pub rho2_positive_cells: usize,
    pub g_monotone: bool,
    /// Worst `(A(k₁s) - g₁(s)s) / A(k₁s)` over `s ∈ [s₀, 10³ s₀]`.
    pub growth_margin: f64,
    pub passed: bool,
}

/// Check the one-sided growth data against `A` on `mesh`.
pub fn check_hypothesis_h(h: &HypothesisH, a: &YoungFunction, mesh: &Mesh, samples: usize) -> HypothesisReport {
    let k1_bound = k1_upper_bound(mesh.dim(), mesh.domain().measure());
    let k1_in_range = h.k1 > 0.0 && h.k1 < k1_bound;
    let rho_min = (0..mesh.node_count())
        .map(|i| {
            let x = mesh.coords(i);
            (h.rho1)(x).min((h.rho2)(x))
        })
        .fold(f64::INFINITY, f64::min);
    let rho2_positive_cells = (0..mesh.cell_count())
        .filter(|&c| {
            let nodes = mesh.cell(c);
            let avg = nodes.iter().map(|&n| (h.rho2)(mesh.coords(n))).sum::<f64>() / nodes.len() as f64;
            avg > 0.0
        })
        .count();
    let s = log_samples(h.s0, 1e3 * h.s0, samples.max(2));
    let mut g_monotone = (h.g1)(0.0) == 0.0 && (h.g2)(0.0) == 0.0;
    let mut prev = (0.0, 0.0);
    for t in log_samples(1e-6 * h.s0, 1e3 * h.s0, samples.max(2)) {
        let cur = ((h.g1)(t), (h.g2)(t));
        if cur.0 < prev.0 || cur.1 < prev.1 || cur.0 < 0.0 || cur.1 < 0.0 {
            g_monotone = false;
        }
        prev = cur;
    }
    let growth_margin = s
        .iter()
        .map(|&t| {
            let rhs = a.value(h.k1 * t);
            (rhs - (h.g1)(t) * t) / rhs
        })
        .fold(f64::INFINITY, f64::min);
    let passed = k1_in_range
        && rho_min >= 0.0
        && rho2_positive_cells > 0
        && g_monotone
        && growth_margin >= -MARGIN_TOLERANCE;
    HypothesisReport {
        k1: h.k1,
        k1_bound,
        k1_in_range,
        rho_min,
        rho2_positive_cells,
        g_monotone,
        growth_margin,
        passed,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub samples: usize,
    /// Worst `(σ(x) + a A'(|ξ|)|ξ| - |f|) / max(1, σ(x) + a A'(|ξ|)|ξ|)`.
    pub worst_margin: f64,
    pub passed: bool,
    /// `max_x max{ρ₁ + g₁(u̅), ρ₂ + g₂(u̅)}` when one-sided data is present.
    pub sigma_from_one_sided: Option<f64>,
}

/// Sample `|f(x,s,ξ)| ≤ σ(x) + a A'(|ξ|)|ξ|` at every node, `s_count`
/// evenly spaced `s` in the nodal bracket and `xi_count` gradients with
/// log-uniform magnitude in `[1e-3, 1e3]` plus `ξ = 0`.
pub fn check_growth_h(
    f: &ConvectionTerm,
    bracket: &SubSuperPair,
    a: &YoungFunction,
    s_count: usize,
    xi_count: usize,
    seed: u64,
) -> Result<GrowthReport> {
    let growth = f
        .growth
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter(format!("convection `{}` declares no growth bound", f.name())))?;
    let mesh = bracket.lower().mesh();
    let dim = mesh.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xis: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    for _ in 0..xi_count {
        let mag = 10f64.powf(rng.gen_range(-3.0..=3.0));
        let mut dir: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r = crate::operator::norm(&dir).max(1e-300);
        dir.iter_mut().for_each(|d| *d *= mag / r);
        xis.push(dir);
    }
    let mut worst = f64::INFINITY;
    let mut count = 0;
    for i in 0..mesh.node_count() {
        let x = mesh.coords(i);
        let sigma = (growth.sigma)(x);
        let (lo, hi) = (bracket.lower().values()[i], bracket.upper().values()[i]);
        for j in 0..s_count.max(1) {
            let s = if s_count <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * j as f64 / (s_count - 1) as f64
            };
            for xi in &xis {
                let r = crate::operator::norm(xi);
                let rhs = sigma + growth.a * a.deriv1(r) * r;
                let lhs = f.eval(x, s, xi).abs();
                worst = worst.min((rhs - lhs) / rhs.max(1.0));
                count += 1;
            }
        }
    }
    let sigma_from_one_sided = f.one_sided.as_ref().map(|h| {
        (0..mesh.node_count())
            .map(|i| {
                let x = mesh.coords(i);
                let top = bracket.upper().values()[i].max(0.0);
                ((h.rho1)(x) + (h.g1)(top)).max((h.rho2)(x) + (h.g2)(top))
            })
            .fold(0.0, f64::max)
    });
    Ok(GrowthReport {
        samples: count,
        worst_margin: worst,
        passed: worst >= -MARGIN_TOLERANCE,
        sigma_from_one_sided,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Serialize)]
pub struct WeakInequalityReport {
    /// Largest violation of the weak inequality, per unit lumped mass.
    pub worst_violation: f64,
    pub worst_node: Option<usize>,
    pub boundary_ok: bool,
    pub tolerance: f64,
    pub passed: bool,
}

fn weak_inequality(
    u: &DiscreteField,
    f: &ConvectionTerm,
    op: &ALaplacian,
    sign: f64,
    tol: f64,
) -> Result<WeakInequalityReport> {
    let mesh = u.mesh();
    let dim = mesh.dim();
    let grads = u.nodal_gradients();
    let load: Vec<f64> = (0..mesh.node_count())
        .map(|i| f.eval(mesh.coords(i), u.values()[i], &grads[i][..dim]))
        .collect();
    let r = nodal_residual(op, &load, u)?;
    let mut worst = f64::NEG_INFINITY;
    let mut worst_node = None;
    for &n in mesh.interior_nodes() {
        let v = sign * r[n] / mesh.lumped_mass(n);
        if v > worst {
            worst = v;
            worst_node = Some(n);
        }
    }
    let boundary_ok = mesh.boundary_nodes().all(|n| sign * u.values()[n] <= 0.0);
    let scale = load.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let worst = worst.max(0.0);
    Ok(WeakInequalityReport {
        worst_violation: worst,
        worst_node,
        boundary_ok,
        tolerance: tol * scale,
        passed: boundary_ok && worst <= tol * scale,
    })
}

/// `∫ A'(|∇u|) ∇u/|∇u| · ∇φ_i ≤ ∫ f(x, u, ∇u) φ_i` for every interior hat
/// function, and `u ≤ 0` on the boundary.
pub fn verify_subsolution(u: &DiscreteField, f: &ConvectionTerm, op: &ALaplacian, tol: f64) -> Result<WeakInequalityReport> {
    weak_inequality(u, f, op, 1.0, tol)
}

/// Reverse inequality and `u ≥ 0` on the boundary.
pub fn verify_supersolution(
    u: &DiscreteField,
    f: &ConvectionTerm,
    op: &ALaplacian,
    tol: f64,
) -> Result<WeakInequalityReport> {
    weak_inequality(u, f, op, -1.0, tol)
}

#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    pub sign: Sign,
    /// Smallest `|u|` over interior nodes with the right sign, or the
    /// negated size of the worst wrong-signed value.
    pub min_signed: f64,
    pub worst_node: Option<usize>,
    pub passed: bool,
}

/// All interior nodes strictly of the given sign.
pub fn check_interior_sign(u: &DiscreteField, sign: Sign) -> SignReport {
    let s = match sign {
        Sign::Positive => 1.0,
        Sign::Negative => -1.0,
    };
    let mut min_signed = f64::INFINITY;
    let mut worst_node = None;
    for &n in u.mesh().interior_nodes() {
        let v = s * u.values()[n];
        if v < min_signed {
            min_signed = v;
            worst_node = Some(n);
        }
    }
    SignReport {
        sign,
        min_signed,
        worst_node,
        passed: min_signed > 0.0,
    }
}

/// Data of the positivity certificate: `b(s) = A(ks)/s`, used on
/// `(0, δ̄)` and extended by the same formula beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivityCertificate {
    pub k: f64,
    pub delta_bar: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub h: u32,
    pub b1: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub samples: usize,
    /// `H(s) ≥ (p_A - 1) A(s)`.
    pub margin_h_lower: f64,
    /// `B(s) ≤ A(ks)` on `(0, δ̄)`.
    pub margin_b_upper: f64,
    /// `A(ks) ≤ K^h A(s)`.
    pub margin_doubling: f64,
    /// `1/H⁻¹(B(s)) ≥ (p_A - 1)/(b₁ s)`.
    pub margin_reciprocal: f64,
    /// `∫ 1/H⁻¹(B)` over the samples (trapezoid in `ln s`).
    pub integral: f64,
    /// `(p_A - 1)/b₁ · ln(s_max / s_min)`.
    pub divergence_surrogate: f64,
    pub passed: bool,
}

impl PositivityCertificate {
    pub fn validate(&self) -> Result<()> {
        if self.k > 0.0 && self.delta_bar > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("certificate needs k > 0 and δ̄ > 0".into()))
        }
    }

    pub fn b(&self, a: &YoungFunction, s: f64) -> f64 {
        if s <= 0.0 {
            0.0
        } else {
            a.value(self.k * s) / s
        }
    }

    /// `B(s) = ∫₀ˢ b`.
    pub fn big_b(&self, a: &YoungFunction, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        s * integrate_unit_dyadic(|u| self.b(a, s * u))
    }

    /// Smallest `h` with `k < 2^h`.
    pub fn h(&self) -> u32 {
        let mut h = 0;
        while self.k >= 2f64.powi(h as i32) {
            h += 1;
        }
        h
    }
}

/// `H(s) = sA'(s) - A(s)`.
pub fn big_h(a: &YoungFunction, s: f64) -> f64 {
    s * a.deriv1(s) - a.value(s)
}

fn big_h_inverse(a: &YoungFunction, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    let mut steps = 0;
    while big_h(a, hi) < y {
        hi *= 2.0;
        steps += 1;
        if steps > 2100 {
            return Err(Error::NonFinite("H⁻¹ bracket".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if big_h(a, mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Check the chain of inequalities behind the positivity conclusion at
/// `samples` log-spaced points of `[1e-8, b₁ δ̄ / (p_A - 1)]`.
pub fn positivity_certificate(
    cert: &PositivityCertificate,
    a: &YoungFunction,
    bounds: &IndexBounds,
    doubling: &DoublingConstants,
    samples: usize,
) -> Result<CertificateReport> {
    cert.validate()?;
    let pa1 = bounds.p_a - 1.0;
    if pa1 <= 0.0 {
        return Err(Error::InvalidParameter("p_A must exceed 1".into()));
    }
    let h = cert.h();
    let kh = doubling.k_delta2.powi(h as i32);
    let b1 = pa1.max(kh);
    let s_min = 1e-8;
    let s_max = b1 * cert.delta_bar / pa1;
    let s = log_samples(s_min, s_max, samples.max(2));

    let mut prev_h = 0.0;
    let (mut m1, mut m2, mut m3, mut m4) = (f64::INFINITY, f64::INFINITY, f64::INFINITY, f64::INFINITY);
    let mut recip = Vec::with_capacity(s.len());
    for &si in &s {
        let hv = big_h(a, si);
        if hv <= prev_h {
            return Err(Error::NonMonotone(format!("H is not increasing at s = {si:e}")));
        }
        prev_h = hv;
        let av = a.value(si);
        m1 = m1.min((hv - pa1 * av) / hv);
        let aks = a.value(cert.k * si);
        let bb = cert.big_b(a, si);
        if si < cert.delta_bar {
            m2 = m2.min((aks - bb) / aks);
        }
        m3 = m3.min((kh * av - aks) / (kh * av));
        let inv = big_h_inverse(a, bb)?;
        let lhs = 1.0 / inv;
        let rhs = pa1 / (b1 * si);
        m4 = m4.min((lhs - rhs) / lhs);
        recip.push(lhs);
    }
    let integral: f64 = s
        .windows(2)
        .zip(recip.windows(2))
        .map(|(w, r)| 0.5 * (r[0] * w[0] + r[1] * w[1]) * (w[1] / w[0]).ln())
        .sum();
    let divergence_surrogate = pa1 / b1 * (s_max / s_min).ln();
    let passed = [m1, m2, m3, m4].iter().all(|m| *m >= -MARGIN_TOLERANCE);
    Ok(CertificateReport {
        h,
        b1,
        s_min,
        s_max,
        samples: s.len(),
        margin_h_lower: m1,
        margin_b_upper: m2,
        margin_doubling: m3,
        margin_reciprocal: m4,
        integral,
        divergence_surrogate,
        passed,
    })
}
