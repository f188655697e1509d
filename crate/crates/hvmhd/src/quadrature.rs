//! Adaptive Gauss-Legendre quadrature on intervals.

use std::sync::OnceLock;

const ORDER: usize = 16;

fn nodes() -> &'static ([f64; ORDER], [f64; ORDER]) {
    static NODES: OnceLock<([f64; ORDER], [f64; ORDER])> = OnceLock::new();
    NODES.get_or_init(|| legendre_nodes(ORDER))
}

/// Nodes and weights of the `n`-point rule on [-1, 1].
fn legendre_nodes<const N: usize>(n: usize) -> ([f64; N], [f64; N]) {
    let mut x = [0.0; N];
    let mut w = [0.0; N];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, z);
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Fixed 16-point rule on [a, b].
pub fn gauss<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let (x, w) = nodes();
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut s = 0.0;
    for i in 0..ORDER {
        s += w[i] * f(mid + half * x[i]);
    }
    s * half
}

/// Adaptive bisection until two-panel and one-panel estimates agree to
/// `tol` (absolute, scaled by the interval share). Requests below rounding
/// level are raised to a few ulps of the running total.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let left = gauss(f, a, m);
        let right = gauss(f, m, b);
        let both = left + right;
        let floor = 8.0 * f64::EPSILON * both.abs();
        if depth >= 40 || (both - whole).abs() <= tol.max(floor) {
            return both;
        }
        rec(f, a, m, left, 0.5 * tol, depth + 1) + rec(f, m, b, right, 0.5 * tol, depth + 1)
    }
    let whole = gauss(&f, a, b);
    let tol = tol.max(8.0 * f64::EPSILON * whole.abs());
    rec(&f, a, b, whole, tol, 0)
}
