//! Gauss–Legendre quadrature helpers.

use std::sync::OnceLock;

const GL_POINTS: usize = 16;

struct Rule {
    nodes: [f64; GL_POINTS],
    weights: [f64; GL_POINTS],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let (nodes, weights) = gauss_legendre(GL_POINTS);
        let mut rule = Rule {
            nodes: [0.0; GL_POINTS],
            weights: [0.0; GL_POINTS],
        };
        rule.nodes.copy_from_slice(&nodes);
        rule.weights.copy_from_slice(&weights);
        rule
    })
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// 16-point Gauss–Legendre rule on `[a, b]`.
pub fn gl16<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut sum = 0.0;
    for (x, w) in r.nodes.iter().zip(r.weights.iter()) {
        sum += w * f(mid + half * x);
    }
    sum * half
}

/// `∫₀¹ f(u) du` for integrands that are smooth on `(0, 1]` and may have a
/// power-type endpoint behaviour at `u = 0`. Panels are dyadic,
/// `[2^{-k-1}, 2^{-k}]`, and summed until they stop contributing.
pub fn integrate_unit_dyadic<F: FnMut(f64) -> f64>(mut f: F) -> f64 {
    let mut sum = 0.0;
    let mut hi = 1.0_f64;
    for k in 0..1070 {
        let lo = 0.5 * hi;
        let panel = gl16(&mut f, lo, hi);
        sum += panel;
        if k >= 8 && panel.abs() <= 1e-18 * sum.abs() {
            break;
        }
        if k >= 64 && sum == 0.0 {
            break;
        }
        hi = lo;
    }
    sum
}

/// Adaptive Gauss–Legendre quadrature on `[a, b]` with relative tolerance `tol`.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn recurse<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let mid = 0.5 * (a + b);
        let left = gl16(&mut *f, a, mid);
        let right = gl16(&mut *f, mid, b);
        let refined = left + right;
        if depth == 0 || (refined - whole).abs() <= tol * refined.abs().max(f64::MIN_POSITIVE) {
            return refined;
        }
        recurse(f, a, mid, left, tol, depth - 1) + recurse(f, mid, b, right, tol, depth - 1)
    }
    let whole = gl16(&mut f, a, b);
    recurse(&mut f, a, b, whole, tol, 40)
}
