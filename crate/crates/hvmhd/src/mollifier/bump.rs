//! The radial bump `θ₀(x) = c·exp(−1/(1−4|x|²))` on `|x| < 1/2` and its
//! derivative tensors.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::quadrature::integrate;

pub const SUPPORT: f64 = 0.5;

fn unnormalized(r: f64) -> f64 {
    let q = 1.0 - 4.0 * r * r;
    if q <= 0.0 {
        0.0
    } else {
        (-1.0 / q).exp()
    }
}

/// Normalization constant `c` with `∫θ₀ = 1`.
pub fn normalization() -> f64 {
    static C: OnceLock<f64> = OnceLock::new();
    *C.get_or_init(|| {
        let m = 4.0 * PI * integrate(|r| r * r * unnormalized(r), 0.0, SUPPORT, 1e-17);
        1.0 / m
    })
}

/// `θ₀` as a function of the radius.
pub fn theta0(r: f64) -> f64 {
    normalization() * unnormalized(r)
}

/// `∫|x|²θ₀ dx`.
pub fn second_moment() -> f64 {
    4.0 * PI * integrate(|r| r.powi(4) * theta0(r), 0.0, SUPPORT, 1e-17)
}

/// Radial Fourier transform `∫θ₀(x) e^{-i s e·x} dx` for a unit vector `e`.
pub fn transform(s: f64) -> f64 {
    let sinc = |x: f64| if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    4.0 * PI * integrate(|r| r * r * theta0(r) * sinc(s * r), 0.0, SUPPORT, 1e-17)
}

/// Truncated multivariate Taylor expansion in three variables.
#[derive(Clone, Debug)]
struct Jet {
    m: usize,
    c: Vec<f64>,
}

impl Jet {
    fn zero(m: usize) -> Self {
        Jet {
            m,
            c: vec![0.0; (m + 1).pow(3)],
        }
    }

    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        (a * (self.m + 1) + b) * (self.m + 1) + c
    }

    fn exps(m: usize, degree: usize) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for a in 0..=degree.min(m) {
            for b in 0..=(degree - a) {
                out.push([a, b, degree - a - b]);
            }
        }
        out
    }

    fn get(&self, e: [usize; 3]) -> f64 {
        self.c[self.idx(e[0], e[1], e[2])]
    }

    fn add_to(&mut self, e: [usize; 3], v: f64) {
        let i = self.idx(e[0], e[1], e[2]);
        self.c[i] += v;
    }

    /// Degree-`d` part of `self·other` restricted to pairs `(i, d−i)` with
    /// `i ∈ from..=d`.
    fn mul_degree(&self, other: &Jet, d: usize, lo: usize, weight: impl Fn(usize) -> f64) -> Jet {
        let mut out = Jet::zero(self.m);
        for i in lo..=d {
            let w = weight(i);
            if w == 0.0 {
                continue;
            }
            for ea in Self::exps(self.m, i) {
                let va = self.get(ea);
                if va == 0.0 {
                    continue;
                }
                for eb in Self::exps(self.m, d - i) {
                    let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                    out.add_to(e, w * va * other.get(eb));
                }
            }
        }
        out
    }

    fn set_degree(&mut self, d: usize, part: &Jet) {
        for e in Self::exps(self.m, d) {
            let i = self.idx(e[0], e[1], e[2]);
            self.c[i] = part.c[i];
        }
    }

    fn recip(&self) -> Jet {
        let q0 = self.c[0];
        let mut r = Jet::zero(self.m);
        r.c[0] = 1.0 / q0;
        for d in 1..=self.m {
            let mut part = self.mul_degree(&r, d, 1, |_| 1.0);
            for v in &mut part.c {
                *v *= -1.0 / q0;
            }
            r.set_degree(d, &part);
        }
        r
    }

    fn exp(&self) -> Jet {
        let mut e = Jet::zero(self.m);
        e.c[0] = self.c[0].exp();
        for d in 1..=self.m {
            let mut part = self.mul_degree(&e, d, 1, |j| j as f64);
            for v in &mut part.c {
                *v /= d as f64;
            }
            e.set_degree(d, &part);
        }
        e
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Frobenius norm of the `m`-th derivative tensor of `θ₀` at radius `r`.
pub fn derivative_norm(m: usize, r: f64) -> f64 {
    let q0 = 1.0 - 4.0 * r * r;
    if q0 <= 0.0 {
        return 0.0;
    }
    // |x0 + h|² at x0 = (r, 0, 0)
    let mut s = Jet::zero(m);
    s.c[0] = r * r;
    if m >= 1 {
        s.add_to([1, 0, 0], 2.0 * r);
    }
    if m >= 2 {
        s.add_to([2, 0, 0], 1.0);
        s.add_to([0, 2, 0], 1.0);
        s.add_to([0, 0, 2], 1.0);
    }
    let mut q = s;
    for v in &mut q.c {
        *v *= -4.0;
    }
    q.c[0] += 1.0;
    let mut w = q.recip();
    for v in &mut w.c {
        *v = -*v;
    }
    let e = w.exp();
    let c = normalization();
    let mut sum = 0.0;
    for ex in Jet::exps(m, m) {
        let coef = c * e.get(ex);
        let alpha = factorial(ex[0]) * factorial(ex[1]) * factorial(ex[2]);
        sum += factorial(m) * alpha * coef * coef;
    }
    sum.sqrt()
}
