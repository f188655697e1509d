//! Products evaluated on a zero-padded grid and truncated back.
//!
//! Inputs are padded to `m ≥ 3n/2` points per axis (Nyquist coefficients are
//! split evenly between `±n/2` so the padded field is real and agrees with the
//! input at the original nodes), multiplied pointwise, transformed, and
//! truncated to the product band `|k_i| < fraction·n/2`.

use std::sync::Arc;

use num_complex::Complex64;

use super::field::{ScalarField, VectorField};
use super::grid::{wavenumber, Grid};
use super::ops;
use crate::fft::{self, RealFft3};
use crate::par;

pub type Padded = Vec<f64>;
pub type PaddedVec = [Vec<f64>; 3];

#[derive(Clone)]
pub struct Dealias {
    grid: Grid,
    m: usize,
    plan: Arc<RealFft3>,
}

impl Dealias {
    pub fn new(grid: Grid) -> Self {
        let m = grid.padded_n();
        Dealias {
            grid,
            m,
            plan: fft::plan(m),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn padded_n(&self) -> usize {
        self.m
    }

    pub fn padded_len(&self) -> usize {
        self.m * self.m * self.m
    }

    /// Physical values of `f` on the padded grid.
    pub fn pad(&self, f: &ScalarField) -> Padded {
        let n = self.grid.n();
        let m = self.m;
        let hn = self.grid.half();
        let hm = m / 2 + 1;
        let ny = (n / 2) as i64;
        let src = f.coeffs();
        let mut dst = vec![Complex64::default(); m * m * hm];
        let targets = |k: i64| -> ([(usize, f64); 2], usize) {
            if k.abs() == ny {
                ([(ny as usize, 0.5), (m - ny as usize, 0.5)], 2)
            } else {
                ([(k.rem_euclid(m as i64) as usize, 1.0), (0, 0.0)], 1)
            }
        };
        for i0 in 0..n {
            let (t0, c0) = targets(wavenumber(i0, n));
            for i1 in 0..n {
                let (t1, c1) = targets(wavenumber(i1, n));
                for i2 in 0..hn {
                    let z = src[(i0 * n + i1) * hn + i2];
                    if z == Complex64::default() {
                        continue;
                    }
                    let w2 = if i2 as i64 == ny { 0.5 } else { 1.0 };
                    for &(a, wa) in &t0[..c0] {
                        for &(b, wb) in &t1[..c1] {
                            dst[(a * m + b) * hm + i2] += z * (wa * wb * w2);
                        }
                    }
                }
            }
        }
        self.plan.inverse(&dst)
    }

    pub fn pad_vector(&self, v: &VectorField) -> PaddedVec {
        let (a, (b, c)) = par::join(
            || self.pad(v.comp(0)),
            || par::join(|| self.pad(v.comp(1)), || self.pad(v.comp(2))),
        );
        [a, b, c]
    }

    /// Transform padded physical values and keep the product band.
    pub fn truncate(&self, p: &[f64]) -> ScalarField {
        let n = self.grid.n();
        let m = self.m;
        let hn = self.grid.half();
        let hm = m / 2 + 1;
        let spec = self.plan.forward(p);
        let g = self.grid;
        let mut out = vec![Complex64::default(); g.spectral_len()];
        par::fill(&mut out, |idx| {
            let k = g.k_of(idx);
            if !g.in_product_band(k) {
                return Complex64::default();
            }
            let a = k[0].rem_euclid(m as i64) as usize;
            let b = k[1].rem_euclid(m as i64) as usize;
            spec[(a * m + b) * hm + k[2] as usize]
        });
        debug_assert_eq!(out.len(), n * n * hn);
        let mut f = ScalarField::from_coeffs(g, out).expect("same grid");
        f.enforce_hermitian();
        f
    }

    pub fn truncate_vector(&self, p: &PaddedVec) -> VectorField {
        let (a, (b, c)) = par::join(
            || self.truncate(&p[0]),
            || par::join(|| self.truncate(&p[1]), || self.truncate(&p[2])),
        );
        VectorField::new([a, b, c]).expect("same grid")
    }
}

/// Pointwise helpers on padded arrays.
pub mod pointwise {
    use super::{Padded, PaddedVec};
    use crate::par;

    pub fn mul(a: &[f64], b: &[f64]) -> Padded {
        let mut out = vec![0.0; a.len()];
        par::fill(&mut out, |i| a[i] * b[i]);
        out
    }

    pub fn dot(u: &PaddedVec, v: &PaddedVec) -> Padded {
        let mut out = vec![0.0; u[0].len()];
        par::fill(&mut out, |i| u[0][i] * v[0][i] + u[1][i] * v[1][i] + u[2][i] * v[2][i]);
        out
    }

    pub fn cross(u: &PaddedVec, v: &PaddedVec) -> PaddedVec {
        let len = u[0].len();
        let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        let [o0, o1, o2] = &mut out;
        par::fill(o0, |i| u[1][i] * v[2][i] - u[2][i] * v[1][i]);
        par::fill(o1, |i| u[2][i] * v[0][i] - u[0][i] * v[2][i]);
        par::fill(o2, |i| u[0][i] * v[1][i] - u[1][i] * v[0][i]);
        out
    }

    pub fn scale(f: &[f64], v: &PaddedVec) -> PaddedVec {
        [mul(f, &v[0]), mul(f, &v[1]), mul(f, &v[2])]
    }

    /// `(a·∇)u` given `a` and the padded gradient `du[i][j] = ∂_j u_i`.
    pub fn advect(a: &PaddedVec, du: &[PaddedVec; 3]) -> PaddedVec {
        let len = a[0].len();
        let mut out = [vec![0.0; len], vec![0.0; len], vec![0.0; len]];
        for (c, o) in out.iter_mut().enumerate() {
            let d = &du[c];
            par::fill(o, |i| a[0][i] * d[0][i] + a[1][i] * d[1][i] + a[2][i] * d[2][i]);
        }
        out
    }

    pub fn add_scaled(acc: &mut PaddedVec, s: f64, x: &PaddedVec) {
        for c in 0..3 {
            let xs = &x[c];
            par::for_chunks(&mut acc[c], par::REDUCE_CHUNK, |k, chunk| {
                let base = k * par::REDUCE_CHUNK;
                for (j, a) in chunk.iter_mut().enumerate() {
                    *a += s * xs[base + j];
                }
            });
        }
    }
}

/// Padded gradient tensor `du[i][j] = ∂_j u_i`.
pub fn pad_gradient(d: &Dealias, u: &VectorField) -> [PaddedVec; 3] {
    let g0 = ops::grad(u.comp(0));
    let g1 = ops::grad(u.comp(1));
    let g2 = ops::grad(u.comp(2));
    [d.pad_vector(&g0), d.pad_vector(&g1), d.pad_vector(&g2)]
}

pub fn mul(a: &ScalarField, b: &ScalarField) -> ScalarField {
    let d = Dealias::new(a.grid());
    d.truncate(&pointwise::mul(&d.pad(a), &d.pad(b)))
}

pub fn dot(u: &VectorField, v: &VectorField) -> ScalarField {
    let d = Dealias::new(u.grid());
    d.truncate(&pointwise::dot(&d.pad_vector(u), &d.pad_vector(v)))
}

pub fn cross(u: &VectorField, v: &VectorField) -> VectorField {
    let d = Dealias::new(u.grid());
    d.truncate_vector(&pointwise::cross(&d.pad_vector(u), &d.pad_vector(v)))
}

pub fn scalar_mul(f: &ScalarField, v: &VectorField) -> VectorField {
    let d = Dealias::new(f.grid());
    d.truncate_vector(&pointwise::scale(&d.pad(f), &d.pad_vector(v)))
}

/// `t[i][j] = u_i v_j`.
pub fn tensor(u: &VectorField, v: &VectorField) -> [[ScalarField; 3]; 3] {
    let d = Dealias::new(u.grid());
    let pu = d.pad_vector(u);
    let pv = d.pad_vector(v);
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| d.truncate(&pointwise::mul(&pu[i], &pv[j]))))
}

/// `(a·∇)u`.
pub fn advect(a: &VectorField, u: &VectorField) -> VectorField {
    let d = Dealias::new(a.grid());
    let pa = d.pad_vector(a);
    let du = pad_gradient(&d, u);
    d.truncate_vector(&pointwise::advect(&pa, &du))
}
