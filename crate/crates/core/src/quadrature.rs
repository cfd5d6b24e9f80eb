//! Composite Gauss–Legendre quadrature with adaptive panel bisection.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rule with `n` points, roots found by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate a vector-valued `f` over `[a, b]` with a single panel.
    pub fn integrate<const K: usize>(&self, a: f64, b: f64, f: &impl Fn(f64) -> [f64; K]) -> [f64; K] {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = [0.0; K];
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(mid + half * x);
            for k in 0..K {
                acc[k] += w * v[k];
            }
        }
        acc.map(|s| s * half)
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

pub(crate) fn default_rule() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<const K: usize> {
    pub value: [f64; K],
    /// Largest per-component error estimate relative to the component's L1 norm.
    pub relative_error: f64,
    pub converged: bool,
}

const MAX_DEPTH: u32 = 48;

/// Adaptive composite quadrature of `f` over `[a, b]`.
///
/// `breakpoints` seeds the initial panels (must lie strictly inside `(a, b)`, ascending).
/// Each panel is bisected until the one-panel and two-half-panel estimates agree to
/// `rel_tol` times the component's L1 norm over the whole interval.
pub fn integrate_adaptive<const K: usize>(
    f: &impl Fn(f64) -> [f64; K],
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
) -> Integral<K> {
    let rule = default_rule();
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    edges.extend(breakpoints.iter().copied().filter(|&x| x > a && x < b));
    edges.push(b);

    // L1 scale per component from the seed panels.
    let abs_f = |x: f64| f(x).map(f64::abs);
    let mut scale = [0.0; K];
    for w in edges.windows(2) {
        let s = rule.integrate(w[0], w[1], &abs_f);
        for k in 0..K {
            scale[k] += s[k];
        }
    }
    let tol: [f64; K] = scale.map(|s| rel_tol * s.max(f64::MIN_POSITIVE));
    let total_len = b - a;

    let mut value = [0.0; K];
    let mut worst = 0.0_f64;
    let mut converged = true;
    for w in edges.windows(2) {
        let whole = rule.integrate(w[0], w[1], f);
        let (v, err, ok) = refine(rule, f, w[0], w[1], whole, &tol, total_len, 0);
        converged &= ok;
        for k in 0..K {
            value[k] += v[k];
            worst = worst.max(err[k] / scale[k].max(f64::MIN_POSITIVE));
        }
    }
    Integral {
        value,
        relative_error: worst,
        converged,
    }
}

#[allow(clippy::too_many_arguments)]
fn refine<const K: usize>(
    rule: &GaussLegendre,
    f: &impl Fn(f64) -> [f64; K],
    a: f64,
    b: f64,
    whole: [f64; K],
    tol: &[f64; K],
    total_len: f64,
    depth: u32,
) -> ([f64; K], [f64; K], bool) {
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, f);
    let right = rule.integrate(mid, b, f);
    let mut split = [0.0; K];
    let mut err = [0.0; K];
    let share = (b - a) / total_len;
    let mut ok = true;
    for k in 0..K {
        split[k] = left[k] + right[k];
        err[k] = (split[k] - whole[k]).abs();
        // Panels hugging an endpoint singularity shrink without their relative error
        // improving; the depth-halved absolute share lets them terminate. The last floor
        // keeps round-off from forcing endless bisection.
        let local = (tol[k] * share)
            .max(tol[k] * 0.5_f64.powi(depth as i32 + 6))
            .max(64.0 * f64::EPSILON * split[k].abs());
        if err[k] > local {
            ok = false;
        }
    }
    if ok {
        return (split, err, true);
    }
    if depth >= MAX_DEPTH || mid <= a || mid >= b {
        return (split, err, false);
    }
    let (lv, le, lok) = refine(rule, f, a, mid, left, tol, total_len, depth + 1);
    let (rv, re, rok) = refine(rule, f, mid, b, right, tol, total_len, depth + 1);
    let mut v = [0.0; K];
    let mut e = [0.0; K];
    for k in 0..K {
        v[k] = lv[k] + rv[k];
        e[k] = le[k] + re[k];
    }
    (v, e, lok && rok)
}
