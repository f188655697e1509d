//! Real orthonormal divergence-free Fourier basis.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{Grid, ScalarField, VectorField};

/// Spatial profile of a basis element.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    Constant,
    /// `cos(k·x)` for `k` in the upper half-space.
    Cos,
    /// `sin(p·x)` with `p = −k`, for `k` in the lower half-space.
    Sin,
}

/// One basis field `W = c·profile(x)·direction`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisMode {
    /// Label wavevector; cosine modes carry `p`, sine modes carry `−p`.
    pub k: [i64; 3],
    pub polarization: usize,
    pub profile: Profile,
    pub direction: [f64; 3],
}

impl BasisMode {
    pub fn k_squared(&self) -> f64 {
        (self.k[0] * self.k[0] + self.k[1] * self.k[1] + self.k[2] * self.k[2]) as f64
    }

    /// Wavevector stored in the half-spectrum sense (upper half-space).
    fn carrier(&self) -> [i64; 3] {
        match self.profile {
            Profile::Sin => [-self.k[0], -self.k[1], -self.k[2]],
            _ => self.k,
        }
    }

    /// Physical value of the mode at `x`.
    pub fn value(&self, x: [f64; 3]) -> [f64; 3] {
        let p = self.carrier();
        let phase = p[0] as f64 * x[0] + p[1] as f64 * x[1] + p[2] as f64 * x[2];
        let s = match self.profile {
            Profile::Constant => (2.0 * PI).powf(-1.5),
            Profile::Cos => oscillating_amplitude() * phase.cos(),
            Profile::Sin => oscillating_amplitude() * phase.sin(),
        };
        self.direction.map(|d| s * d)
    }
}

fn oscillating_amplitude() -> f64 {
    2f64.sqrt() * (2.0 * PI).powf(-1.5)
}

fn upper_half(k: [i64; 3]) -> bool {
    k.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0)
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v.map(|c| c / n)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// Two unit vectors orthogonal to `k` and to each other.
fn polarizations(k: [i64; 3]) -> [[f64; 3]; 2] {
    let kf = normalize(k.map(|c| c as f64));
    let mut axis = 0;
    for d in 1..3 {
        if kf[d].abs() < kf[axis].abs() {
            axis = d;
        }
    }
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let e1 = normalize(cross(kf, e));
    let e2 = cross(kf, e1);
    [e1, e2]
}

/// Ordered list of orthonormal divergence-free eigenfunctions of the Laplacian.
#[derive(Clone, Debug)]
pub struct GalerkinBasis {
    grid: Grid,
    modes: Vec<BasisMode>,
}

/// The first `n_modes` basis fields, ordered by `|k|²`, then `k`
/// lexicographically, then polarization.
pub fn galerkin_basis(grid: Grid, n_modes: usize) -> Result<GalerkinBasis> {
    if n_modes == 0 {
        return Err(Error::param("n_modes", "must be at least 1"));
    }
    let cut = grid.nyquist();
    let mut ks = Vec::new();
    for a in -cut..=cut {
        for b in -cut..=cut {
            for c in -cut..=cut {
                let k = [a, b, c];
                if k != [0, 0, 0] && grid.in_product_band(k) && !grid.is_nyquist(k) {
                    ks.push(k);
                }
            }
        }
    }
    ks.sort_by_key(|k| (k[0] * k[0] + k[1] * k[1] + k[2] * k[2], *k));
    let capacity = 3 + 2 * ks.len();
    if n_modes > capacity {
        return Err(Error::param(
            "n_modes",
            format!("grid of size {} holds at most {capacity} modes", grid.n()),
        ));
    }
    let mut modes = Vec::with_capacity(capacity);
    for (a, dir) in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].into_iter().enumerate() {
        modes.push(BasisMode {
            k: [0; 3],
            polarization: a,
            profile: Profile::Constant,
            direction: dir,
        });
    }
    for k in ks {
        let (profile, p) = if upper_half(k) {
            (Profile::Cos, k)
        } else {
            (Profile::Sin, [-k[0], -k[1], -k[2]])
        };
        for (a, dir) in polarizations(p).into_iter().enumerate() {
            modes.push(BasisMode {
                k,
                polarization: a,
                profile,
                direction: dir,
            });
        }
    }
    modes.truncate(n_modes);
    Ok(GalerkinBasis { grid, modes })
}

impl GalerkinBasis {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[BasisMode] {
        &self.modes
    }

    /// Laplacian eigenvalues `−|k_j|²`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.modes.iter().map(|m| -m.k_squared()).collect()
    }

    /// `Σ c_j W_j` as a grid field.
    pub fn synthesize(&self, c: &[f64]) -> VectorField {
        assert_eq!(c.len(), self.len());
        let g = self.grid;
        let mut comps = [ScalarField::zeros(g), ScalarField::zeros(g), ScalarField::zeros(g)];
        let amp = oscillating_amplitude();
        for (mode, &cj) in self.modes.iter().zip(c) {
            let p = mode.carrier();
            let z = match mode.profile {
                Profile::Constant => Complex64::new(cj * (2.0 * PI).powf(-1.5), 0.0),
                Profile::Cos => Complex64::new(0.5 * amp * cj, 0.0),
                Profile::Sin => Complex64::new(0.0, -0.5 * amp * cj),
            };
            for (d, comp) in comps.iter_mut().enumerate() {
                add_mode(comp, p, z * mode.direction[d]);
            }
        }
        let mut v = VectorField::new(comps).expect("same grid");
        v.mark_divergence_free().expect("basis fields are solenoidal");
        v
    }

    /// `⟨V, W_j⟩` for every basis element.
    pub fn project(&self, v: &VectorField) -> Vec<f64> {
        let amp = oscillating_amplitude() * (2.0 * PI).powi(3);
        self.modes
            .iter()
            .map(|mode| {
                let p = mode.carrier();
                let mut dot = Complex64::default();
                for d in 0..3 {
                    dot += v.comp(d).coeff_at(p).unwrap_or_default() * mode.direction[d];
                }
                match mode.profile {
                    Profile::Constant => (2.0 * PI).powf(1.5) * dot.re,
                    Profile::Cos => amp * dot.re,
                    Profile::Sin => -amp * dot.im,
                }
            })
            .collect()
    }
}

/// Add `z·e^{ip·x}` and its conjugate partner to a half-spectrum field.
fn add_mode(f: &mut ScalarField, p: [i64; 3], z: Complex64) {
    let g = f.grid();
    if p == [0, 0, 0] {
        f.coeffs_mut()[0] += z;
        return;
    }
    let (p, z) = if p[2] < 0 { ([-p[0], -p[1], -p[2]], z.conj()) } else { (p, z) };
    let i = g.index_of(p).expect("mode inside grid");
    f.coeffs_mut()[i] += z;
    if p[2] == 0 {
        let j = g.index_of([-p[0], -p[1], 0]).expect("mode inside grid");
        f.coeffs_mut()[j] += z.conj();
    }
}
