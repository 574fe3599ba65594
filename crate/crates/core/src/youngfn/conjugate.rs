use super::YoungLike;
use crate::{Error, Result};

/// Sample grids for the numeric conjugate: the `s` values at which `Ã` is
/// tabulated and the `t` values searched for the supremum.
#[derive(Debug, Clone)]
pub struct ConjugateGrid {
    s: Vec<f64>,
    t: Vec<f64>,
}

fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

impl ConjugateGrid {
    /// `ns` log-spaced `s` values on `[s_min, s_max]`; `t = 0` plus `nt`
    /// log-spaced values on `[t_min, t_max]`.
    pub fn new(s_min: f64, s_max: f64, ns: usize, t_min: f64, t_max: f64, nt: usize) -> Result<Self> {
        if !(s_min > 0.0 && s_max > s_min && t_min > 0.0 && t_max > t_min && ns >= 2 && nt >= 3) {
            return Err(Error::InvalidParameter("bad conjugate grid".into()));
        }
        let mut t = vec![0.0];
        t.extend(log_spaced(t_min, t_max, nt));
        Ok(ConjugateGrid {
            s: log_spaced(s_min, s_max, ns),
            t,
        })
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }
}

impl Default for ConjugateGrid {
    fn default() -> Self {
        Self::new(1e-4, 1e4, 2001, 1e-8, 1e8, 4001).expect("static grid")
    }
}

/// Tabulated `Ã(s) = sup_{t ≥ 0} (st - A(t))`, interpolated by cubic Hermite
/// splines using the maximizer `t*(s) = Ã'(s)` as the slope.
#[derive(Debug, Clone)]
pub struct ConjugateFunction {
    s: Vec<f64>,
    values: Vec<f64>,
    argmax: Vec<f64>,
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a <= 1e-15 * b.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Numeric Young conjugate of `a` on `grid`: a grid maximum followed by a
/// golden-section refinement between the neighbouring grid points.
pub fn conjugate<Y: YoungLike + ?Sized>(a: &Y, grid: &ConjugateGrid) -> Result<ConjugateFunction> {
    let t = &grid.t;
    let at: Vec<f64> = t.iter().map(|&x| a.eval(x)).collect();
    if at.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("Young function value on the conjugate t-grid".into()));
    }
    let last = t.len() - 1;
    let mut values = Vec::with_capacity(grid.s.len());
    let mut argmax = Vec::with_capacity(grid.s.len());
    let mut j = 0usize;
    for &s in &grid.s {
        // st - A(t) is concave in t, so the grid maximizer is unimodal and
        // nondecreasing in s.
        let obj = |k: usize| s * t[k] - at[k];
        while j < last && obj(j + 1) >= obj(j) {
            j += 1;
        }
        while j > 0 && obj(j - 1) > obj(j) {
            j -= 1;
        }
        if j == last {
            return Err(Error::SupNotAttained { s });
        }
        let lo = if j == 0 { 0.0 } else { t[j - 1] };
        let (t_star, refined) = golden_max(|x| s * x - a.eval(x), lo, t[j + 1]);
        let (t_star, best) = if refined >= obj(j) { (t_star, refined) } else { (t[j], obj(j)) };
        values.push(best.max(0.0));
        argmax.push(t_star);
    }
    Ok(ConjugateFunction {
        s: grid.s.clone(),
        values,
        argmax,
    })
}

fn hermite(s0: f64, s1: f64, y0: f64, y1: f64, m0: f64, m1: f64, s: f64) -> f64 {
    let h = s1 - s0;
    let tau = (s - s0) / h;
    let tau2 = tau * tau;
    let tau3 = tau2 * tau;
    (2.0 * tau3 - 3.0 * tau2 + 1.0) * y0
        + (tau3 - 2.0 * tau2 + tau) * h * m0
        + (-2.0 * tau3 + 3.0 * tau2) * y1
        + (tau3 - tau2) * h * m1
}

impl ConjugateFunction {
    /// `Ã(s)`. Zero at `s ≤ 0`, `+∞` beyond the tabulated range.
    pub fn eval(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let n = self.s.len();
        if s > self.s[n - 1] {
            return f64::INFINITY;
        }
        if s < self.s[0] {
            return hermite(0.0, self.s[0], 0.0, self.values[0], 0.0, self.argmax[0], s).max(0.0);
        }
        let i = self.s.partition_point(|&x| x <= s).clamp(1, n - 1);
        hermite(
            self.s[i - 1],
            self.s[i],
            self.values[i - 1],
            self.values[i],
            self.argmax[i - 1],
            self.argmax[i],
            s,
        )
    }

    /// The maximizing `t` at the tabulated `s` values.
    pub fn argmax(&self) -> &[f64] {
        &self.argmax
    }

    pub fn s(&self) -> &[f64] {
        &self.s
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn s_max(&self) -> f64 {
        self.s[self.s.len() - 1]
    }
}

impl YoungLike for ConjugateFunction {
    fn eval(&self, t: f64) -> f64 {
        ConjugateFunction::eval(self, t)
    }
}
