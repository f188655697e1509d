//! Random band-limited fields for tests and verification drivers.

use num_complex::Complex64;
use rand::Rng;

use super::field::{ScalarField, VectorField};
use super::grid::Grid;
use super::ops::leray_project;

/// Real scalar field with independent coefficients on `|k|∞ ≤ kmax`.
pub fn scalar<R: Rng>(grid: Grid, kmax: i64, rng: &mut R) -> ScalarField {
    let mut c = vec![Complex64::default(); grid.spectral_len()];
    for (i, z) in c.iter_mut().enumerate() {
        let k = grid.k_of(i);
        if k.iter().all(|&v| v.abs() <= kmax) && !grid.is_nyquist(k) {
            *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut f = ScalarField::from_coeffs(grid, c).expect("length matches");
    f.enforce_hermitian();
    f
}

pub fn vector<R: Rng>(grid: Grid, kmax: i64, rng: &mut R) -> VectorField {
    VectorField::new([scalar(grid, kmax, rng), scalar(grid, kmax, rng), scalar(grid, kmax, rng)])
        .expect("same grid")
}

pub fn solenoidal<R: Rng>(grid: Grid, kmax: i64, rng: &mut R) -> VectorField {
    leray_project(&vector(grid, kmax, rng))
}
