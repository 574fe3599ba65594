use serde::{Deserialize, Serialize};

use super::YoungFunction;
use crate::{Error, Result};

/// Sample set for the index quotients, stored as values of `ln t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogGrid {
    ln_t: Vec<f64>,
}

const STANDARD_LN_MIN: f64 = -13.815_510_557_964_274; // ln 1e-6
const STANDARD_LN_MAX: f64 = 13.815_510_557_964_274; // ln 1e6

/// Half-width in `ln t` of the wide grid. The logarithmic families approach
/// their limiting indices like `q / ln t`, which needs `|ln t|` in the
/// thousands for three correct digits.
pub const WIDE_LN_RADIUS: f64 = 2500.0;

impl LogGrid {
    /// `points` samples, log-spaced on `[t_min, t_max]`.
    pub fn new(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if !(t_min > 0.0 && t_max > t_min) {
            return Err(Error::InvalidParameter(format!("bad grid range [{t_min}, {t_max}]")));
        }
        Self::from_ln(t_min.ln(), t_max.ln(), points)
    }

    /// `points` samples uniformly spaced in `ln t` on `[ln_min, ln_max]`.
    pub fn from_ln(ln_min: f64, ln_max: f64, points: usize) -> Result<Self> {
        if points < 2 || !(ln_max > ln_min) || !ln_min.is_finite() || !ln_max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bad log grid: [{ln_min}, {ln_max}] with {points} points"
            )));
        }
        let step = (ln_max - ln_min) / (points - 1) as f64;
        let ln_t = (0..points)
            .map(|i| if i + 1 == points { ln_max } else { ln_min + step * i as f64 })
            .collect();
        Ok(LogGrid { ln_t })
    }

    /// `[1e-6, 1e6]` with 241 points.
    pub fn standard() -> Self {
        Self::from_ln(STANDARD_LN_MIN, STANDARD_LN_MAX, 241).expect("static grid")
    }

    /// The standard grid merged with a uniform `ln t` grid on
    /// `[-WIDE_LN_RADIUS, WIDE_LN_RADIUS]`. Only usable with functions whose
    /// log-forms are evaluated without forming `t` (the built-in families).
    pub fn wide() -> Self {
        let outer = Self::from_ln(-WIDE_LN_RADIUS, WIDE_LN_RADIUS, 2001).expect("static grid");
        outer.merge(&Self::standard())
    }

    /// Default grid for `a`: wide for built-in families, standard otherwise.
    pub fn default_for(a: &YoungFunction) -> Self {
        if a.family().is_some() {
            Self::wide()
        } else {
            Self::standard()
        }
    }

    pub fn merge(&self, other: &LogGrid) -> LogGrid {
        let mut ln_t: Vec<f64> = self.ln_t.iter().chain(other.ln_t.iter()).copied().collect();
        ln_t.sort_by(f64::total_cmp);
        ln_t.dedup();
        LogGrid { ln_t }
    }

    /// Insert the midpoint of every gap. The refined grid contains the
    /// original one.
    pub fn refine(&self) -> LogGrid {
        let mut ln_t = Vec::with_capacity(2 * self.ln_t.len());
        for w in self.ln_t.windows(2) {
            ln_t.push(w[0]);
            ln_t.push(0.5 * (w[0] + w[1]));
        }
        ln_t.extend(self.ln_t.last());
        LogGrid { ln_t }
    }

    pub fn ln_points(&self) -> &[f64] {
        &self.ln_t
    }

    pub fn len(&self) -> usize {
        self.ln_t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_t.is_empty()
    }

    fn check_coverage(&self) -> Result<()> {
        let (lo, hi) = (self.ln_t[0], self.ln_t[self.ln_t.len() - 1]);
        if self.ln_t.len() < 200 || lo > STANDARD_LN_MIN + 1e-12 || hi < STANDARD_LN_MAX - 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "index grid must span [1e-6, 1e6] with at least 200 points (got [{:e}, {:e}], {} points)",
                lo.exp(),
                hi.exp(),
                self.ln_t.len()
            )));
        }
        Ok(())
    }
}

/// Index bounds of a Young function: `δ ≤ tA''/A' ≤ g₀` and
/// `p_A ≤ tA'/A ≤ q_A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexBounds {
    pub delta: f64,
    pub g0: f64,
    pub p_a: f64,
    pub q_a: f64,
}

impl IndexBounds {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= self.g0 && self.g0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "index bounds need 0 < delta <= g0 < inf, got delta = {}, g0 = {}",
                self.delta, self.g0
            )));
        }
        if !(self.p_a > 1.0 && self.p_a <= self.q_a && self.q_a.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "index bounds need 1 < p_A <= q_A < inf, got p_A = {}, q_A = {}",
                self.p_a, self.q_a
            )));
        }
        Ok(())
    }

    /// `min{δ, 1}`, the ellipticity factor of the A-Laplacian.
    pub fn ellipticity(&self) -> f64 {
        self.delta.min(1.0)
    }
}

/// Min/max of the sampled quotients over `grid`.
pub fn estimate_index_bounds(a: &YoungFunction, grid: &LogGrid) -> Result<IndexBounds> {
    grid.check_coverage()?;
    let mut b = IndexBounds {
        delta: f64::INFINITY,
        g0: f64::NEG_INFINITY,
        p_a: f64::INFINITY,
        q_a: f64::NEG_INFINITY,
    };
    for &lt in grid.ln_points() {
        let second = a.elasticity(lt);
        let first = a.growth_index(lt);
        if !second.is_finite() || !first.is_finite() {
            return Err(Error::NonFinite(format!(
                "index quotient of {} at t = e^{lt} (tA''/A' = {second}, tA'/A = {first})",
                a.name()
            )));
        }
        b.delta = b.delta.min(second);
        b.g0 = b.g0.max(second);
        b.p_a = b.p_a.min(first);
        b.q_a = b.q_a.max(first);
    }
    Ok(b)
}

/// Global doubling constants: `A(2t) ≤ K_Δ2 A(t)` and `A(2t) ≥ K_∇2 A(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoublingConstants {
    pub k_delta2: f64,
    pub k_nabla2: f64,
}

impl DoublingConstants {
    /// `(2^{g₀+1} - K_Δ2, K_∇2 - 2^{δ+1})`; both are nonnegative when the
    /// index bounds imply the doubling bounds.
    pub fn margins(&self, bounds: &IndexBounds) -> (f64, f64) {
        (
            2f64.powf(bounds.g0 + 1.0) - self.k_delta2,
            self.k_nabla2 - 2f64.powf(bounds.delta + 1.0),
        )
    }
}

/// Max and min of `A(2t)/A(t)` over `grid`.
pub fn doubling_constants(a: &YoungFunction, bounds: &IndexBounds, grid: &LogGrid) -> Result<DoublingConstants> {
    bounds.validate()?;
    let ln2 = std::f64::consts::LN_2;
    let mut k = DoublingConstants {
        k_delta2: f64::NEG_INFINITY,
        k_nabla2: f64::INFINITY,
    };
    for &lt in grid.ln_points() {
        let ratio = a.log_ratio(lt, ln2).exp();
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(Error::NonFinite(format!("A(2t)/A(t) of {} at t = e^{lt}", a.name())));
        }
        k.k_delta2 = k.k_delta2.max(ratio);
        k.k_nabla2 = k.k_nabla2.min(ratio);
    }
    Ok(k)
}
