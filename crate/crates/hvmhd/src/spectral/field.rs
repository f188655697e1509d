use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};
use crate::fft;
use crate::par;

/// Tolerance of the divergence-free flag.
pub const DIV_FREE_TOL: f64 = 1e-12;

/// Real scalar field stored as half-spectrum Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        ScalarField {
            grid,
            coeffs: vec![Complex64::default(); grid.spectral_len()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        let mut f = Self::zeros(grid);
        f.coeffs[0] = Complex64::new(value, 0.0);
        f
    }

    pub fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.spectral_len() {
            return Err(Error::structural(format!(
                "coefficient array has length {}, grid needs {}",
                coeffs.len(),
                grid.spectral_len()
            )));
        }
        Ok(ScalarField { grid, coeffs })
    }

    /// Transform physical samples `f(x_j)` at `x_j = j·2π/n`.
    pub fn from_physical(grid: Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.physical_len() {
            return Err(Error::structural(format!(
                "sample array has length {}, grid needs {}",
                samples.len(),
                grid.physical_len()
            )));
        }
        let coeffs = fft::plan(grid.n()).forward(samples);
        let mut f = ScalarField { grid, coeffs };
        f.enforce_hermitian();
        Ok(f)
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> f64 + Sync + Send,
    {
        let samples = sample_grid(grid, f);
        Self::from_physical(grid, &samples).expect("sample length matches grid")
    }

    pub fn to_physical(&self) -> Vec<f64> {
        fft::plan(self.grid.n()).inverse(&self.coeffs)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at wavevector `k` (any sign), if representable.
    pub fn coeff_at(&self, k: [i64; 3]) -> Option<Complex64> {
        if let Some(i) = self.grid.index_of(k) {
            return Some(self.coeffs[i]);
        }
        let mk = [-k[0], -k[1], -k[2]];
        self.grid.index_of(mk).map(|i| self.coeffs[i].conj())
    }

    /// Make the two self-paired planes exactly Hermitian.
    pub fn enforce_hermitian(&mut self) {
        let n = self.grid.n();
        let h = self.grid.half();
        let planes: &[usize] = &[0, n / 2];
        for &i2 in planes {
            for i0 in 0..n {
                for i1 in 0..n {
                    let a = (i0 * n + i1) * h + i2;
                    let b = (((n - i0) % n) * n + (n - i1) % n) * h + i2;
                    if a == b {
                        self.coeffs[a].im = 0.0;
                    } else if a < b {
                        let avg = (self.coeffs[a] + self.coeffs[b].conj()) * 0.5;
                        self.coeffs[a] = avg;
                        self.coeffs[b] = avg.conj();
                    }
                }
            }
        }
    }

    /// Largest violation of `c(-k) = conj c(k)` among stored pairs.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.grid.n();
        let h = self.grid.half();
        let mut worst = 0.0_f64;
        for i2 in [0, n / 2] {
            for i0 in 0..n {
                for i1 in 0..n {
                    let a = (i0 * n + i1) * h + i2;
                    let b = (((n - i0) % n) * n + (n - i1) % n) * h + i2;
                    worst = worst.max((self.coeffs[a] - self.coeffs[b].conj()).norm());
                }
            }
        }
        worst
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// ∫ f dx over the torus.
    pub fn integral(&self) -> f64 {
        Grid::volume() * self.mean()
    }

    /// L² inner product ∫ a b dx via Parseval.
    pub fn inner(&self, other: &ScalarField) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        let g = self.grid;
        let a = &self.coeffs;
        let b = &other.coeffs;
        Grid::volume() * par::sum(a.len(), |i| g.hermitian_weight(i) * (a[i].conj() * b[i]).re)
    }

    pub fn norm_l2_sq(&self) -> f64 {
        self.inner(self)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        let c = &self.coeffs;
        par::max(c.len(), |i| c[i].norm())
    }

    pub fn max_abs_physical(&self) -> f64 {
        let p = self.to_physical();
        par::max(p.len(), |i| p[i].abs())
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn scale(&mut self, s: f64) {
        par::for_chunks(&mut self.coeffs, par::REDUCE_CHUNK, |_, c| {
            for z in c {
                *z *= s;
            }
        });
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: f64, x: &ScalarField) {
        debug_assert_eq!(self.grid, x.grid);
        let xs = &x.coeffs;
        par::for_chunks(&mut self.coeffs, par::REDUCE_CHUNK, |c, chunk| {
            let base = c * par::REDUCE_CHUNK;
            for (j, z) in chunk.iter_mut().enumerate() {
                *z += xs[base + j] * a;
            }
        });
    }

    pub fn add(&self, other: &ScalarField) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &ScalarField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Multiply each coefficient by `m(k)`.
    pub fn apply_multiplier<M>(&mut self, m: M)
    where
        M: Fn([i64; 3]) -> Complex64 + Sync + Send,
    {
        let g = self.grid;
        par::for_chunks(&mut self.coeffs, par::REDUCE_CHUNK, |c, chunk| {
            let base = c * par::REDUCE_CHUNK;
            for (j, z) in chunk.iter_mut().enumerate() {
                *z *= m(g.k_of(base + j));
            }
        });
    }

    pub fn zero_nyquist(&mut self) {
        let g = self.grid;
        self.apply_multiplier(|k| {
            if g.is_nyquist(k) {
                Complex64::default()
            } else {
                Complex64::new(1.0, 0.0)
            }
        });
    }
}

/// Real vector field with three scalar components and a divergence-free flag.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    comps: [ScalarField; 3],
    divergence_free: bool,
}

impl VectorField {
    pub fn new(comps: [ScalarField; 3]) -> Result<Self> {
        comps[0].grid.check_same(&comps[1].grid)?;
        comps[0].grid.check_same(&comps[2].grid)?;
        Ok(VectorField {
            comps,
            divergence_free: false,
        })
    }

    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            comps: [ScalarField::zeros(grid), ScalarField::zeros(grid), ScalarField::zeros(grid)],
            divergence_free: true,
        }
    }

    pub fn constant(grid: Grid, value: [f64; 3]) -> Self {
        VectorField {
            comps: value.map(|c| ScalarField::constant(grid, c)),
            divergence_free: true,
        }
    }

    pub fn from_fn<F>(grid: Grid, f: F) -> Self
    where
        F: Fn([f64; 3]) -> [f64; 3] + Sync + Send,
    {
        let comps = [0, 1, 2].map(|c| ScalarField::from_fn(grid, |x| f(x)[c]));
        VectorField {
            comps,
            divergence_free: false,
        }
    }

    pub fn from_physical(grid: Grid, samples: [&[f64]; 3]) -> Result<Self> {
        Ok(VectorField {
            comps: [
                ScalarField::from_physical(grid, samples[0])?,
                ScalarField::from_physical(grid, samples[1])?,
                ScalarField::from_physical(grid, samples[2])?,
            ],
            divergence_free: false,
        })
    }

    pub(crate) fn from_parts(comps: [ScalarField; 3], divergence_free: bool) -> Self {
        VectorField {
            comps,
            divergence_free,
        }
    }

    pub fn grid(&self) -> Grid {
        self.comps[0].grid
    }

    pub fn comp(&self, i: usize) -> &ScalarField {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[ScalarField; 3] {
        &self.comps
    }

    pub fn into_comps(self) -> [ScalarField; 3] {
        self.comps
    }

    /// Mutable component access clears the divergence-free flag.
    pub fn comps_mut(&mut self) -> &mut [ScalarField; 3] {
        self.divergence_free = false;
        &mut self.comps
    }

    pub fn divergence_free(&self) -> bool {
        self.divergence_free
    }

    /// `max_k |k·c(k)| / max_k |c(k)|`, zero for the zero field.
    pub fn divergence_residual(&self) -> f64 {
        let g = self.grid();
        let [a, b, c] = &self.comps;
        let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
        let top = par::max(a.len(), |i| {
            let k = g.k_of(i);
            (a[i] * k[0] as f64 + b[i] * k[1] as f64 + c[i] * k[2] as f64).norm()
        });
        let scale = par::max(a.len(), |i| {
            (a[i].norm_sqr() + b[i].norm_sqr() + c[i].norm_sqr()).sqrt()
        });
        if scale == 0.0 {
            0.0
        } else {
            top / scale
        }
    }

    /// Set the flag after checking the residual.
    pub fn mark_divergence_free(&mut self) -> Result<()> {
        let r = self.divergence_residual();
        if r > DIV_FREE_TOL {
            return Err(Error::Input(format!(
                "field is not divergence-free (residual {r:.3e})"
            )));
        }
        self.divergence_free = true;
        Ok(())
    }

    pub fn to_physical(&self) -> [Vec<f64>; 3] {
        let (a, (b, c)) = par::join(
            || self.comps[0].to_physical(),
            || par::join(|| self.comps[1].to_physical(), || self.comps[2].to_physical()),
        );
        [a, b, c]
    }

    pub fn mean(&self) -> [f64; 3] {
        [self.comps[0].mean(), self.comps[1].mean(), self.comps[2].mean()]
    }

    pub fn integral(&self) -> [f64; 3] {
        self.mean().map(|m| m * Grid::volume())
    }

    pub fn inner(&self, other: &VectorField) -> f64 {
        (0..3).map(|i| self.comps[i].inner(&other.comps[i])).sum()
    }

    pub fn norm_l2_sq(&self) -> f64 {
        self.inner(self)
    }

    /// ‖∇v‖² = Σ |k|²|c(k)|² (2π)³.
    pub fn grad_norm_sq(&self) -> f64 {
        let g = self.grid();
        let [a, b, c] = &self.comps;
        let (a, b, c) = (a.coeffs(), b.coeffs(), c.coeffs());
        Grid::volume()
            * par::sum(a.len(), |i| {
                let k = g.k_of(i);
                let k2 = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64;
                g.hermitian_weight(i) * k2 * (a[i].norm_sqr() + b[i].norm_sqr() + c[i].norm_sqr())
            })
    }

    /// Largest pointwise magnitude |v(x_j)| on the grid.
    pub fn max_magnitude(&self) -> f64 {
        let p = self.to_physical();
        par::max(p[0].len(), |i| {
            (p[0][i] * p[0][i] + p[1][i] * p[1][i] + p[2][i] * p[2][i]).sqrt()
        })
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.comps.iter().map(|c| c.max_abs_coeff()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|c| c.is_finite())
    }

    pub fn scale(&mut self, s: f64) {
        for c in &mut self.comps {
            c.scale(s);
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.scale(s);
        out
    }

    pub fn axpy(&mut self, a: f64, x: &VectorField) {
        for i in 0..3 {
            self.comps[i].axpy(a, &x.comps[i]);
        }
        self.divergence_free = self.divergence_free && x.divergence_free;
    }

    pub fn add(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }

    pub fn sub(&self, other: &VectorField) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Multiply every component by the same real multiplier `m(k)`; keeps the flag.
    pub fn apply_scalar_multiplier<M>(&mut self, m: M)
    where
        M: Fn([i64; 3]) -> f64 + Sync + Send,
    {
        for c in &mut self.comps {
            c.apply_multiplier(|k| Complex64::new(m(k), 0.0));
        }
    }

    pub fn enforce_hermitian(&mut self) {
        for c in &mut self.comps {
            c.enforce_hermitian();
        }
    }
}

/// Sample `f` at the grid nodes.
pub fn sample_grid<F>(grid: Grid, f: F) -> Vec<f64>
where
    F: Fn([f64; 3]) -> f64 + Sync + Send,
{
    let n = grid.n();
    let dx = grid.dx();
    let mut out = vec![0.0; grid.physical_len()];
    par::fill(&mut out, |i| {
        let j2 = i % n;
        let j1 = (i / n) % n;
        let j0 = i / (n * n);
        f([j0 as f64 * dx, j1 as f64 * dx, j2 as f64 * dx])
    });
    out
}
