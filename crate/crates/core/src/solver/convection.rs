use std::fmt;
use std::sync::Arc;

use crate::operator::{norm, ALaplacian};

pub type XFunc = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type SFunc = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FFunc = Arc<dyn Fn(&[f64], f64, &[f64]) -> f64 + Send + Sync>;

/// Declared bound `|f(x,s,ξ)| ≤ σ(x) + a A'(|ξ|)|ξ|` on the bracket.
#[derive(Clone)]
pub struct GrowthBound {
    pub sigma: XFunc,
    pub a: f64,
}

/// One-sided growth data: `ρ₁, ρ₂ ≥ 0`, nondecreasing `g₁, g₂` vanishing at
/// zero, the gradient coefficient `a(s)`, the threshold `s₀` and `k₁`.
#[derive(Clone)]
pub struct HypothesisH {
    pub rho1: XFunc,
    pub rho2: XFunc,
    pub g1: SFunc,
    pub g2: SFunc,
    pub a: SFunc,
    pub s0: f64,
    pub k1: f64,
}

impl fmt::Debug for HypothesisH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HypothesisH")
            .field("s0", &self.s0)
            .field("k1", &self.k1)
            .finish_non_exhaustive()
    }
}

/// A convection term `f(x, s, ξ)` with its declared growth data.
#[derive(Clone)]
pub struct ConvectionTerm {
    name: String,
    f: FFunc,
    pub growth: Option<GrowthBound>,
    pub one_sided: Option<HypothesisH>,
}

impl fmt::Debug for ConvectionTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvectionTerm")
            .field("name", &self.name)
            .field("growth_a", &self.growth.as_ref().map(|g| g.a))
            .field("one_sided", &self.one_sided)
            .finish()
    }
}

impl ConvectionTerm {
    pub fn new<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(&[f64], f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        ConvectionTerm {
            name: name.into(),
            f: Arc::new(f),
            growth: None,
            one_sided: None,
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("{c}"), move |_, _, _| c).with_growth(Arc::new(move |_| c.abs()), 0.0)
    }

    pub fn with_growth(mut self, sigma: XFunc, a: f64) -> Self {
        self.growth = Some(GrowthBound { sigma, a });
        self
    }

    pub fn with_one_sided(mut self, h: HypothesisH) -> Self {
        self.one_sided = Some(h);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: &[f64], s: f64, xi: &[f64]) -> f64 {
        (self.f)(x, s, xi)
    }

    /// `f₁(x, s, ξ) = -f(x, -s, -ξ)`. The declared two-sided bound carries
    /// over unchanged; one-sided data is dropped since it refers to a sign.
    pub fn mirrored(&self) -> Self {
        let f = self.f.clone();
        ConvectionTerm {
            name: format!("mirror({})", self.name),
            f: Arc::new(move |x, s, xi| {
                let neg: Vec<f64> = xi.iter().map(|v| -v).collect();
                -f(x, -s, &neg)
            }),
            growth: self.growth.clone(),
            one_sided: None,
        }
    }
}

/// `f_R`: equal to `f` for `|ξ| ≤ R` and scaled by `A'(R)R / (A'(|ξ|)|ξ|)`
/// beyond, so that `|f_R| ≤ σ + a A'(R) R`.
#[derive(Debug, Clone)]
pub struct TruncatedConvection<'a> {
    base: &'a ConvectionTerm,
    op: &'a ALaplacian,
    radius: f64,
    cap: f64,
}

pub fn truncate_convection<'a>(f: &'a ConvectionTerm, radius: f64, op: &'a ALaplacian) -> TruncatedConvection<'a> {
    let cap = op.young().deriv1(radius) * radius;
    TruncatedConvection {
        base: f,
        op,
        radius,
        cap,
    }
}

impl TruncatedConvection<'_> {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eval(&self, x: &[f64], s: f64, xi: &[f64]) -> f64 {
        let r = norm(xi);
        let v = self.base.eval(x, s, xi);
        if r <= self.radius {
            v
        } else {
            v * self.cap / (self.op.young().deriv1(r) * r)
        }
    }

    /// `σ(x) + a A'(R) R`, when growth data is declared.
    pub fn cap_bound(&self, x: &[f64]) -> Option<f64> {
        self.base.growth.as_ref().map(|g| (g.sigma)(x) + g.a * self.cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::youngfn::{make_young, Family};

    fn gradient_power_term(op: &ALaplacian) -> ConvectionTerm {
        let a = op.young().clone();
        ConvectionTerm::new("grad", move |_, _, xi| {
            let r = norm(xi);
            a.deriv1(r) * r
        })
    }

    #[test]
    fn truncation_caps_gradient_term() {
        let op = ALaplacian::new(make_young(Family::PowerSum { p: 3.0, q: 2.0 }).unwrap(), 1).unwrap();
        let f = gradient_power_term(&op);
        let fr = truncate_convection(&f, 1.5, &op);
        let cap = op.young().deriv1(1.5) * 1.5;
        assert!((fr.eval(&[0.0], 0.0, &[3.0]) - cap).abs() < 1e-14 * cap);
        assert_eq!(fr.eval(&[0.0], 0.0, &[1.0]), f.eval(&[0.0], 0.0, &[1.0]));
        // continuity across |ξ| = R
        let below = fr.eval(&[0.0], 0.0, &[1.5]);
        let above = fr.eval(&[0.0], 0.0, &[1.5 + 1e-12]);
        assert!((below - above).abs() < 1e-9);
    }

    #[test]
    fn mirror_is_an_involution() {
        let f = ConvectionTerm::new("f", |x, s, xi| x[0] + s * s * s - 2.0 * xi[0]);
        let g = f.mirrored().mirrored();
        for (x, s, xi) in [(0.3, -0.7, 1.1), (-0.5, 0.2, -4.0)] {
            assert_eq!(f.eval(&[x], s, &[xi]), g.eval(&[x], s, &[xi]));
        }
        assert_eq!(ConvectionTerm::constant(2.0).mirrored().eval(&[0.0], 1.0, &[0.0]), -2.0);
    }
}
