//! Young functions and the Orlicz-space machinery built on them.
//!
//! A [`YoungFunction`] carries `A`, `A'` and `A''` on `[0, ∞)` for one of the
//! built-in families (or user closures). Every family additionally evaluates
//! `ln A'(t)`, `tA''(t)/A'(t)` and `tA'(t)/A(t)` as functions of `ln t`, which
//! keeps the index estimates finite far outside the range of `f64` for `t`
//! itself. The logarithmic families only approach their limiting indices like
//! `1/ln t`, so that range is needed.

mod conjugate;
mod index;
mod norm;

pub use conjugate::{conjugate, ConjugateFunction, ConjugateGrid};
pub use index::{doubling_constants, estimate_index_bounds, DoublingConstants, IndexBounds, LogGrid};
pub use norm::{check_holder, integral_abs_product, luxemburg_norm, modular, HolderReport};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::quad::integrate_unit_dyadic;
use crate::{Error, Result};

/// Anything that can be integrated as an Orlicz modular: a Young function or
/// a tabulated conjugate.
pub trait YoungLike {
    fn eval(&self, t: f64) -> f64;
}

/// Sign selector of the logarithmic family.
///
/// `Plus` is `A'(t) = t^{p-1} ln(1 + t^q)`, `Minus` is
/// `A'(t) = t^{p-1} / ln^q(1 + t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogSign {
    #[serde(rename = "+", alias = "plus")]
    Plus,
    #[serde(rename = "-", alias = "minus")]
    Minus,
}

/// Built-in families. `A` is normalized so that `A(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum Family {
    /// `A(t) = t^p / p`.
    Power { p: f64 },
    /// `A(t) = t^p / p + t^q / q` with `1 < q < p`.
    PowerSum { p: f64, q: f64 },
    /// `A(t) = (sqrt(1 + t²) - 1)^γ`.
    SqrtShift { gamma: f64 },
    /// Logarithmic families, specified through `A'`.
    PowerLog { p: f64, q: f64, sign: LogSign },
}

impl Family {
    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match *self {
            Family::Power { p } => {
                if !(p > 1.0 && p.is_finite()) {
                    return bad(format!("power family needs p > 1, got p = {p}"));
                }
            }
            Family::PowerSum { p, q } => {
                if !(q > 1.0 && p > q && p.is_finite()) {
                    return bad(format!("power_sum family needs 1 < q < p, got p = {p}, q = {q}"));
                }
            }
            Family::SqrtShift { gamma } => {
                if !(gamma > 1.0 && gamma.is_finite()) {
                    return bad(format!("sqrt_shift family needs gamma > 1, got {gamma}"));
                }
            }
            Family::PowerLog { p, q, sign } => {
                if !(p > 1.0 && p.is_finite() && q > 0.0 && q.is_finite()) {
                    return bad(format!("power_log family needs p > 1 and q > 0, got p = {p}, q = {q}"));
                }
                if sign == LogSign::Minus && p - q - 1.0 <= 0.0 {
                    return bad(format!(
                        "power_log(-) violates the lower index bound: p - q - 1 = {} must be positive",
                        p - q - 1.0
                    ));
                }
            }
        }
        Ok(())
    }

    fn value(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            Family::Power { p } => t.powf(p) / p,
            Family::PowerSum { p, q } => t.powf(p) / p + t.powf(q) / q,
            Family::SqrtShift { gamma } => {
                let s = t.hypot(1.0);
                (t * t / (s + 1.0)).powf(gamma)
            }
            Family::PowerLog { .. } => t * integrate_unit_dyadic(|u| self.deriv1(t * u)),
        }
    }

    fn deriv1(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match *self {
            Family::Power { p } => t.powf(p - 1.0),
            Family::PowerSum { p, q } => t.powf(p - 1.0) + t.powf(q - 1.0),
            Family::SqrtShift { gamma } => {
                let s = t.hypot(1.0);
                gamma * (t * t / (s + 1.0)).powf(gamma - 1.0) * t / s
            }
            Family::PowerLog { p, q, sign } => match sign {
                LogSign::Plus => t.powf(p - 1.0) * t.powf(q).ln_1p(),
                LogSign::Minus => t.powf(p - 1.0) / t.ln_1p().powf(q),
            },
        }
    }

    fn deriv2(&self, t: f64) -> f64 {
        if t <= 0.0 {
            // limit of A''(t) as t -> 0 from the leading power t^{e}
            let (coeff, exponent) = match *self {
                Family::Power { p } => (p - 1.0, p - 2.0),
                Family::PowerSum { q, .. } => (q - 1.0, q - 2.0),
                Family::SqrtShift { gamma } => (gamma * (2.0 * gamma - 1.0) * 0.5f64.powf(gamma - 1.0), 2.0 * gamma - 2.0),
                Family::PowerLog { p, q, sign: LogSign::Plus } => (p + q - 1.0, p + q - 2.0),
                Family::PowerLog { p, q, sign: LogSign::Minus } => (p - q - 1.0, p - q - 2.0),
            };
            return if exponent > 0.0 {
                0.0
            } else if exponent == 0.0 {
                coeff
            } else {
                f64::INFINITY
            };
        }
        match *self {
            Family::Power { p } => (p - 1.0) * t.powf(p - 2.0),
            Family::PowerSum { p, q } => (p - 1.0) * t.powf(p - 2.0) + (q - 1.0) * t.powf(q - 2.0),
            _ => self.deriv1(t) / t * self.elasticity(t.ln()),
        }
    }

    fn log_deriv1(&self, lt: f64) -> f64 {
        match *self {
            Family::Power { p } => (p - 1.0) * lt,
            Family::PowerSum { p, q } => (q - 1.0) * lt + softplus((p - q) * lt),
            Family::SqrtShift { gamma } => {
                let g = SqrtShiftLogs::new(lt);
                gamma.ln() + (gamma - 1.0) * g.ln_s_minus_1 + lt - g.ln_s
            }
            Family::PowerLog { p, q, sign } => match sign {
                LogSign::Plus => (p - 1.0) * lt + ln_softplus(q * lt),
                LogSign::Minus => (p - 1.0) * lt - q * ln_softplus(lt),
            },
        }
    }

    fn elasticity(&self, lt: f64) -> f64 {
        match *self {
            Family::Power { p } => p - 1.0,
            Family::PowerSum { p, q } => {
                let w = sigmoid((p - q) * lt);
                w * (p - 1.0) + (1.0 - w) * (q - 1.0)
            }
            Family::SqrtShift { gamma } => {
                let inv_s = SqrtShiftLogs::new(lt).inv_s;
                (gamma - 1.0) * (1.0 + inv_s) + inv_s * inv_s
            }
            Family::PowerLog { p, q, sign } => match sign {
                LogSign::Plus => (p - 1.0) + q * sigmoid_over_softplus(q * lt),
                LogSign::Minus => (p - 1.0) - q * sigmoid_over_softplus(lt),
            },
        }
    }

    fn growth_index(&self, lt: f64) -> f64 {
        match *self {
            Family::Power { p } => p,
            Family::PowerSum { p, q } => {
                let w = sigmoid((p - q) * lt);
                1.0 / (w / p + (1.0 - w) / q)
            }
            Family::SqrtShift { gamma } => gamma * (1.0 + SqrtShiftLogs::new(lt).inv_s),
            Family::PowerLog { .. } => {
                // A(t) / (t A'(t)) = ∫₀¹ A'(tu) / A'(t) du
                let base = self.log_deriv1(lt);
                1.0 / integrate_unit_dyadic(|u| (self.log_deriv1(lt + u.ln()) - base).exp())
            }
        }
    }

    fn log_value(&self, lt: f64) -> f64 {
        match *self {
            Family::Power { p } => p * lt - p.ln(),
            Family::PowerSum { p, q } => q * lt - q.ln() + softplus((p - q) * lt + (q / p).ln()),
            Family::SqrtShift { gamma } => gamma * SqrtShiftLogs::new(lt).ln_s_minus_1,
            Family::PowerLog { .. } => lt + self.log_deriv1(lt) - self.growth_index(lt).ln(),
        }
    }

    /// `ln A(e^{lc} t) - ln A(t)`, exact for the pure power.
    fn log_ratio(&self, lt: f64, lc: f64) -> f64 {
        match *self {
            Family::Power { p } => p * lc,
            _ => self.log_value(lt + lc) - self.log_value(lt),
        }
    }

    fn analytic_bounds(&self) -> IndexBounds {
        let (delta, g0, p_a, q_a) = match *self {
            Family::Power { p } => (p - 1.0, p - 1.0, p, p),
            Family::PowerSum { p, q } => (q - 1.0, p - 1.0, q, p),
            Family::SqrtShift { gamma } => (gamma - 1.0, 2.0 * gamma - 1.0, gamma, 2.0 * gamma),
            Family::PowerLog { p, q, sign: LogSign::Plus } => (p - 1.0, p - 1.0 + q, p, p + q),
            Family::PowerLog { p, q, sign: LogSign::Minus } => (p - 1.0 - q, p - 1.0, p - q, p),
        };
        IndexBounds { delta, g0, p_a, q_a }
    }
}

/// `ln s`, `ln(s - 1)` and `1/s` for `s = sqrt(1 + t²)`, `t = e^{lt}`,
/// without forming `t` when it would overflow.
struct SqrtShiftLogs {
    ln_s: f64,
    ln_s_minus_1: f64,
    inv_s: f64,
}

impl SqrtShiftLogs {
    fn new(lt: f64) -> Self {
        let (ln_s, ln_s_plus_1, inv_s) = if lt < 300.0 {
            let t = lt.exp();
            let s = t.hypot(1.0);
            (0.5 * (t * t).ln_1p(), (s + 1.0).ln(), 1.0 / s)
        } else {
            let e = (-lt).exp();
            let r = (1.0 + e * e).sqrt();
            (lt + 0.5 * (e * e).ln_1p(), lt + (r + e).ln(), e / r)
        };
        // s - 1 = t² / (s + 1)
        SqrtShiftLogs {
            ln_s,
            ln_s_minus_1: 2.0 * lt - ln_s_plus_1,
            inv_s,
        }
    }
}

pub(crate) fn softplus(x: f64) -> f64 {
    if x > 36.0 {
        x + (-x).exp()
    } else if x < -36.0 {
        x.exp()
    } else {
        x.exp().ln_1p()
    }
}

/// `ln ln(1 + e^x)`.
pub(crate) fn ln_softplus(x: f64) -> f64 {
    if x > 36.0 {
        (x + (-x).exp().ln_1p()).ln()
    } else if x < -36.0 {
        x - 0.5 * x.exp()
    } else {
        x.exp().ln_1p().ln()
    }
}

pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `e^x / ((1 + e^x) ln(1 + e^x))`, the log-derivative of `ln(1 + e^x)`.
pub(crate) fn sigmoid_over_softplus(x: f64) -> f64 {
    if x < -36.0 {
        1.0 - 0.5 * x.exp()
    } else if x > 36.0 {
        1.0 / ((1.0 + (-x).exp()) * (x + (-x).exp().ln_1p()))
    } else {
        let u = x.exp();
        u / ((1.0 + u) * u.ln_1p())
    }
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

struct CustomYoung {
    name: String,
    value: Box<ScalarFn>,
    deriv1: Box<ScalarFn>,
    deriv2: Box<ScalarFn>,
}

#[derive(Clone)]
enum Repr {
    Family(Family),
    Custom(Arc<CustomYoung>),
}

/// An immutable Young function with its first two derivatives.
#[derive(Clone)]
pub struct YoungFunction {
    repr: Repr,
}

impl fmt::Debug for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Family(fam) => f.debug_tuple("YoungFunction").field(fam).finish(),
            Repr::Custom(c) => f.debug_tuple("YoungFunction").field(&c.name).finish(),
        }
    }
}

/// Build a Young function from one of the built-in families.
pub fn make_young(family: Family) -> Result<YoungFunction> {
    family.validate()?;
    Ok(YoungFunction {
        repr: Repr::Family(family),
    })
}

impl YoungFunction {
    /// Wrap user-supplied `A`, `A'`, `A''`. Rejects functions with
    /// `A(0) ≠ 0` or `A'(0) ≠ 0`, and functions that fail monotonicity or
    /// convexity on a sample of `[1e-3, 1e3]`.
    pub fn custom<V, D1, D2>(name: impl Into<String>, value: V, deriv1: D1, deriv2: D2) -> Result<Self>
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        D1: Fn(f64) -> f64 + Send + Sync + 'static,
        D2: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        if value(0.0).abs() > 1e-14 {
            return Err(Error::InvalidParameter(format!("custom Young function `{name}` has A(0) ≠ 0")));
        }
        if deriv1(0.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("custom Young function `{name}` has A'(0) ≠ 0")));
        }
        for k in 0..=120 {
            let t = 10f64.powf(-3.0 + 6.0 * k as f64 / 120.0);
            let (d1, d2) = (deriv1(t), deriv2(t));
            if !(d1 > 0.0 && d2 >= 0.0 && value(t) > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "custom Young function `{name}` is not increasing and convex at t = {t:e}"
                )));
            }
        }
        Ok(YoungFunction {
            repr: Repr::Custom(Arc::new(CustomYoung {
                name,
                value: Box::new(value),
                deriv1: Box::new(deriv1),
                deriv2: Box::new(deriv2),
            })),
        })
    }

    pub fn family(&self) -> Option<Family> {
        match &self.repr {
            Repr::Family(f) => Some(*f),
            Repr::Custom(_) => None,
        }
    }

    pub fn name(&self) -> String {
        match &self.repr {
            Repr::Family(f) => match *f {
                Family::Power { p } => format!("power(p={p})"),
                Family::PowerSum { p, q } => format!("power_sum(p={p}, q={q})"),
                Family::SqrtShift { gamma } => format!("sqrt_shift(gamma={gamma})"),
                Family::PowerLog { p, q, sign } => {
                    let s = if sign == LogSign::Plus { '+' } else { '-' };
                    format!("power_log(p={p}, q={q}, {s})")
                }
            },
            Repr::Custom(c) => c.name.clone(),
        }
    }

    /// `A(t)`; zero for `t ≤ 0`.
    pub fn value(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.value(t),
            Repr::Custom(c) => (c.value)(t.max(0.0)),
        }
    }

    /// `A'(t)`, with `A'(0) = 0`.
    pub fn deriv1(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.deriv1(t),
            Repr::Custom(c) => {
                if t <= 0.0 {
                    0.0
                } else {
                    (c.deriv1)(t)
                }
            }
        }
    }

    /// `A''(t)`; at `t = 0` the one-sided limit (possibly infinite).
    pub fn deriv2(&self, t: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.deriv2(t),
            Repr::Custom(c) => (c.deriv2)(t.max(0.0)),
        }
    }

    /// `ln A'(e^{lt})`.
    pub fn log_deriv1(&self, lt: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.log_deriv1(lt),
            Repr::Custom(c) => (c.deriv1)(lt.exp()).ln(),
        }
    }

    /// `ln A(e^{lt})`.
    pub fn log_value(&self, lt: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.log_value(lt),
            Repr::Custom(c) => (c.value)(lt.exp()).ln(),
        }
    }

    /// `ln(A(ct)/A(t))` at `t = e^{lt}`, `c = e^{lc}`.
    pub fn log_ratio(&self, lt: f64, lc: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.log_ratio(lt, lc),
            Repr::Custom(_) => self.log_value(lt + lc) - self.log_value(lt),
        }
    }

    /// `t A''(t) / A'(t)` at `t = e^{lt}`.
    pub fn elasticity(&self, lt: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.elasticity(lt),
            Repr::Custom(c) => {
                let t = lt.exp();
                t * (c.deriv2)(t) / (c.deriv1)(t)
            }
        }
    }

    /// `t A'(t) / A(t)` at `t = e^{lt}`.
    pub fn growth_index(&self, lt: f64) -> f64 {
        match &self.repr {
            Repr::Family(f) => f.growth_index(lt),
            Repr::Custom(c) => {
                let t = lt.exp();
                t * (c.deriv1)(t) / (c.value)(t)
            }
        }
    }

    /// Closed-form `(δ, g₀, p_A, q_A)` for the built-in families (the limits
    /// of the index quotients at `0` and `∞`); `None` for custom functions.
    pub fn analytic_bounds(&self) -> Option<IndexBounds> {
        match &self.repr {
            Repr::Family(f) => Some(f.analytic_bounds()),
            Repr::Custom(_) => None,
        }
    }
}

impl YoungLike for YoungFunction {
    fn eval(&self, t: f64) -> f64 {
        self.value(t)
    }
}
