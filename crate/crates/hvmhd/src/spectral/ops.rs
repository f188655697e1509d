//! Fourier-multiplier differential operators and the Leray projector.
//! Every derivative zeroes the Nyquist modes of its output.

use num_complex::Complex64;

use super::field::{ScalarField, VectorField};
use crate::par;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn ik(k: i64) -> Complex64 {
    I * k as f64
}

pub fn grad(f: &ScalarField) -> VectorField {
    let g = f.grid();
    let comps = [0, 1, 2].map(|axis| {
        let mut c = f.clone();
        c.apply_multiplier(|k| if g.is_nyquist(k) { Complex64::default() } else { ik(k[axis]) });
        c
    });
    // gradients are curl-free; the flag stays off
    VectorField::from_parts(comps, false)
}

pub fn div(v: &VectorField) -> ScalarField {
    let g = v.grid();
    let [a, b, c] = v.comps();
    let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
    let mut out = vec![Complex64::default(); a.len()];
    par::fill(&mut out, |i| {
        let k = g.k_of(i);
        if g.is_nyquist(k) {
            Complex64::default()
        } else {
            ik(k[0]) * a[i] + ik(k[1]) * b[i] + ik(k[2]) * c[i]
        }
    });
    ScalarField::from_coeffs(g, out).expect("same grid")
}

pub fn curl(v: &VectorField) -> VectorField {
    let g = v.grid();
    let [a, b, c] = v.comps();
    let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
    let comp = |axis: usize| {
        let mut out = vec![Complex64::default(); a.len()];
        par::fill(&mut out, |i| {
            let k = g.k_of(i);
            if g.is_nyquist(k) {
                return Complex64::default();
            }
            match axis {
                0 => ik(k[1]) * c[i] - ik(k[2]) * b[i],
                1 => ik(k[2]) * a[i] - ik(k[0]) * c[i],
                _ => ik(k[0]) * b[i] - ik(k[1]) * a[i],
            }
        });
        ScalarField::from_coeffs(g, out).expect("same grid")
    };
    VectorField::from_parts([comp(0), comp(1), comp(2)], true)
}

fn k2(k: [i64; 3]) -> f64 {
    (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64
}

pub fn laplacian_scalar(f: &ScalarField) -> ScalarField {
    let g = f.grid();
    let mut out = f.clone();
    out.apply_multiplier(|k| {
        if g.is_nyquist(k) {
            Complex64::default()
        } else {
            Complex64::new(-k2(k), 0.0)
        }
    });
    out
}

pub fn laplacian(v: &VectorField) -> VectorField {
    let g = v.grid();
    let mut out = v.clone();
    out.apply_scalar_multiplier(|k| if g.is_nyquist(k) { 0.0 } else { -k2(k) });
    out
}

/// Leray projection `c − k(k·c)/|k|²`; identity on the mean, Nyquist zeroed.
pub fn leray_project(v: &VectorField) -> VectorField {
    let g = v.grid();
    let [a, b, c] = v.comps();
    let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
    let mut out = [
        vec![Complex64::default(); a.len()],
        vec![Complex64::default(); a.len()],
        vec![Complex64::default(); a.len()],
    ];
    let [o0, o1, o2] = &mut out;
    let project = |i: usize| -> [Complex64; 3] {
        let k = g.k_of(i);
        if g.is_nyquist(k) {
            return [Complex64::default(); 3];
        }
        let kk = k2(k);
        if kk == 0.0 {
            return [a[i], b[i], c[i]];
        }
        let kf = [k[0] as f64, k[1] as f64, k[2] as f64];
        let kc = (a[i] * kf[0] + b[i] * kf[1] + c[i] * kf[2]) / kk;
        [a[i] - kc * kf[0], b[i] - kc * kf[1], c[i] - kc * kf[2]]
    };
    par::fill(o0, |i| project(i)[0]);
    par::fill(o1, |i| project(i)[1]);
    par::fill(o2, |i| project(i)[2]);
    let [o0, o1, o2] = out;
    VectorField::from_parts(
        [
            ScalarField::from_coeffs(g, o0).expect("same grid"),
            ScalarField::from_coeffs(g, o1).expect("same grid"),
            ScalarField::from_coeffs(g, o2).expect("same grid"),
        ],
        true,
    )
}

/// Pressure-like potential `p` with `∇p` equal to the gradient part of `v`:
/// solves `Δp = ∇·v` with zero mean.
pub fn gradient_potential(v: &VectorField) -> ScalarField {
    let mut p = div(v);
    p.apply_multiplier(|k| {
        let kk = k2(k);
        if kk == 0.0 {
            Complex64::default()
        } else {
            Complex64::new(-1.0 / kk, 0.0)
        }
    });
    p
}
