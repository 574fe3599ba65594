use serde::{Deserialize, Serialize};

use crate::analysis::{PositivityCertificate, Sign};
use crate::discretize::Domain;
use crate::solver::SolverSettings;
use crate::youngfn::Family;

/// Scalar function of `s`, composed from a few primitives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SFn {
    Const(f64),
    /// Coefficients in ascending order.
    Poly(Vec<f64>),
    /// `c |s|^p`.
    AbsPower { c: f64, p: f64 },
    /// `num(s) / den(s)` with ascending coefficients.
    Rational { num: Vec<f64>, den: Vec<f64> },
    Sum(Vec<SFn>),
    Product(Vec<SFn>),
}

fn horner(c: &[f64], s: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * s + a)
}

impl SFn {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            SFn::Const(c) => *c,
            SFn::Poly(c) => horner(c, s),
            SFn::AbsPower { c, p } => c * s.abs().powf(*p),
            SFn::Rational { num, den } => horner(num, s) / horner(den, s),
            SFn::Sum(fs) => fs.iter().map(|f| f.eval(s)).sum(),
            SFn::Product(fs) => fs.iter().map(|f| f.eval(s)).product(),
        }
    }
}

/// Scalar function of `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum XFn {
    Const(f64),
    /// `c0 + c · x`.
    Affine {
        #[serde(default)]
        c0: f64,
        #[serde(default)]
        c: Vec<f64>,
    },
    /// `|c0 + c · x|`.
    AbsAffine {
        #[serde(default)]
        c0: f64,
        #[serde(default)]
        c: Vec<f64>,
    },
}

impl XFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let affine = |c0: f64, c: &[f64]| c0 + c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        match self {
            XFn::Const(c) => *c,
            XFn::Affine { c0, c } => affine(*c0, c),
            XFn::AbsAffine { c0, c } => affine(*c0, c).abs(),
        }
    }
}

/// One additive piece of `f(x, s, ξ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TermConfig {
    /// `g(s) h(x)`.
    Source { g: SFn, h: XFn },
    /// `a(s) A'(|ξ|) |ξ|`.
    Gradient { a: SFn },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthConfig {
    pub sigma: XFn,
    pub a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OneSidedConfig {
    pub rho1: XFn,
    pub rho2: XFn,
    pub g1: SFn,
    pub g2: SFn,
    pub a: SFn,
    pub s0: f64,
    pub k1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvectionConfig {
    pub terms: Vec<TermConfig>,
    #[serde(default)]
    pub growth: Option<GrowthConfig>,
    #[serde(default)]
    pub one_sided: Option<OneSidedConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BracketConfig {
    /// Constant sub- and supersolution.
    Constant { lower: f64, upper: f64 },
    /// Supersolution from `-Δ_A u = ρ₁ + g₁(|u|)`, constant lower bound.
    Auxiliary {
        #[serde(default)]
        lower: f64,
    },
}

fn yes() -> bool {
    true
}

fn default_structure_samples() -> usize {
    2000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChecksConfig {
    #[serde(default = "yes")]
    pub structure: bool,
    #[serde(default = "default_structure_samples")]
    pub structure_samples: usize,
    #[serde(default)]
    pub growth_h: bool,
    #[serde(default)]
    pub hypothesis_h: bool,
    #[serde(default)]
    pub sign: Option<Sign>,
    #[serde(default)]
    pub certificate: Option<PositivityCertificate>,
    /// Warn when `|u|_∞ < 1e-3`.
    #[serde(default)]
    pub nontrivial: bool,
    #[serde(default)]
    pub sub_super: bool,
}

impl Default for ChecksConfig {
    fn default() -> Self {
        ChecksConfig {
            structure: true,
            structure_samples: default_structure_samples(),
            growth_h: false,
            hypothesis_h: false,
            sign: None,
            certificate: None,
            nontrivial: false,
            sub_super: false,
        }
    }
}

/// Closed-form solution to compare against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Reference {
    /// `-Δ_p u = 1` on `(-1, 1)`: `u = (p-1)/p (1 - |x|^{p/(p-1)})`.
    PTorsion { p: f64, tol: f64 },
}

impl Reference {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match *self {
            Reference::PTorsion { p, .. } => (p - 1.0) / p * (1.0 - x[0].abs().powf(p / (p - 1.0))),
        }
    }

    pub fn tol(&self) -> f64 {
        match *self {
            Reference::PTorsion { tol, .. } => tol,
        }
    }
}

/// Complete description of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default)]
    pub description: String,
    /// Structural conditions the convection term is chosen to satisfy.
    #[serde(default)]
    pub conditions: Vec<String>,
    pub young: Family,
    pub domain: Domain,
    pub h: f64,
    pub convection: ConvectionConfig,
    pub bracket: BracketConfig,
    #[serde(default)]
    pub settings: SolverSettings,
    #[serde(default)]
    pub checks: ChecksConfig,
    #[serde(default)]
    pub reference: Option<Reference>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sfn_eval() {
        let g = SFn::Poly(vec![1.0, 0.0, -1.0]);
        assert_eq!(g.eval(0.5), 0.75);
        let r = SFn::Rational {
            num: vec![1.0, -1.0],
            den: vec![1.0, 0.0, 1.0],
        };
        assert_eq!(r.eval(1.0), 0.0);
        assert_eq!(r.eval(0.0), 1.0);
        let p = SFn::Product(vec![SFn::Const(2.0), SFn::AbsPower { c: 1.0, p: 2.0 }]);
        assert_eq!(p.eval(-3.0), 18.0);
    }

    #[test]
    fn xfn_eval() {
        let f: XFn = serde_json::from_str(r#"{"abs_affine":{"c":[1.0]}}"#).unwrap();
        assert_eq!(f.eval(&[-0.25]), 0.25);
        let f: XFn = serde_json::from_str(r#"{"affine":{"c0":1.0,"c":[0.0,2.0]}}"#).unwrap();
        assert_eq!(f.eval(&[5.0, 1.0]), 3.0);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(serde_json::from_str::<XFn>(r#"{"affine":{"c0":1.0,"d":2}}"#).is_err());
        assert!(serde_json::from_str::<ChecksConfig>(r#"{"bogus":true}"#).is_err());
    }
}
