//! Real-to-half-spectrum 3-D transforms on cubic grids.
//!
//! Physical arrays are row-major `(j0, j1, j2)` with `j2` fastest. Spectral
//! arrays keep only `i2 ∈ 0..=n/2` (length `n·n·(n/2+1)`), the other half being
//! fixed by Hermitian symmetry. The forward transform divides by `n³`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};
use rustfft::{Fft, FftPlanner};

use crate::par;

pub struct RealFft3 {
    n: usize,
    h: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    r2c: Arc<dyn RealToComplex<f64>>,
    c2r: Arc<dyn ComplexToReal<f64>>,
}

/// Shared plan for an `n³` grid.
pub fn plan(n: usize) -> Arc<RealFft3> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<RealFft3>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    guard
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            let mut real = RealFftPlanner::new();
            Arc::new(RealFft3 {
                n,
                h: n / 2 + 1,
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
                r2c: real.plan_fft_forward(n),
                c2r: real.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl RealFft3 {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half(&self) -> usize {
        self.h
    }

    pub fn spectral_len(&self) -> usize {
        self.n * self.n * self.h
    }

    /// Physical samples to normalized half-spectrum coefficients.
    pub fn forward(&self, real: &[f64]) -> Vec<Complex64> {
        let (n, h) = (self.n, self.h);
        assert_eq!(real.len(), n * n * n, "physical array length");
        let mut spec = vec![Complex64::default(); n * n * h];
        // axis 2 (real lines), one j0-plane per task
        par::for_chunks(&mut spec, n * h, |j0, plane| {
            let mut line = vec![Complex64::default(); n];
            let mut scratch = vec![Complex64::default(); self.fwd.get_inplace_scratch_len()];
            let mut input = vec![0.0; n];
            let mut real_scratch = self.r2c.make_scratch_vec();
            for j1 in 0..n {
                input.copy_from_slice(&real[(j0 * n + j1) * n..(j0 * n + j1 + 1) * n]);
                self.r2c
                    .process_with_scratch(&mut input, &mut plane[j1 * h..(j1 + 1) * h], &mut real_scratch)
                    .expect("real transform lengths");
            }
            self.axis1(plane, &self.fwd, &mut line, &mut scratch);
        });
        self.axis0(&mut spec, &self.fwd);
        let scale = 1.0 / (n * n * n) as f64;
        par::for_chunks(&mut spec, par::REDUCE_CHUNK, |_, c| {
            for z in c {
                *z *= scale;
            }
        });
        spec
    }

    /// Half-spectrum coefficients to physical samples (no scaling).
    pub fn inverse(&self, spec: &[Complex64]) -> Vec<f64> {
        let (n, h) = (self.n, self.h);
        assert_eq!(spec.len(), n * n * h, "spectral array length");
        let mut work = spec.to_vec();
        self.axis0(&mut work, &self.inv);
        let mut real = vec![0.0; n * n * n];
        par::for_chunks(&mut real, n * n, |j0, out| {
            let plane = &work[j0 * n * h..(j0 + 1) * n * h];
            let mut tmp = plane.to_vec();
            let mut line = vec![Complex64::default(); n];
            let mut scratch = vec![Complex64::default(); self.inv.get_inplace_scratch_len()];
            self.axis1(&mut tmp, &self.inv, &mut line, &mut scratch);
            let mut half = vec![Complex64::default(); h];
            let mut real_scratch = self.c2r.make_scratch_vec();
            for j1 in 0..n {
                half.copy_from_slice(&tmp[j1 * h..(j1 + 1) * h]);
                // Imaginary parts at the zero and Nyquist frequencies are
                // dropped, which the transform reports as an input error.
                match self.c2r.process_with_scratch(&mut half, &mut out[j1 * n..(j1 + 1) * n], &mut real_scratch) {
                    Ok(()) | Err(realfft::FftError::InputValues(..)) => {}
                    Err(e) => panic!("inverse real transform: {e}"),
                }
            }
        });
        real
    }

    fn axis1(
        &self,
        plane: &mut [Complex64],
        fft: &Arc<dyn Fft<f64>>,
        line: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        let (n, h) = (self.n, self.h);
        for i2 in 0..h {
            if (0..n).all(|j1| plane[j1 * h + i2] == Complex64::default()) {
                continue;
            }
            for j1 in 0..n {
                line[j1] = plane[j1 * h + i2];
            }
            fft.process_with_scratch(line, scratch);
            for j1 in 0..n {
                plane[j1 * h + i2] = line[j1];
            }
        }
    }

    fn axis0(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let (n, h) = (self.n, self.h);
        let pencils = n * h;
        // gather pencils (i1, i2) as contiguous lines over i0
        let mut t = vec![Complex64::default(); n * pencils];
        {
            let src: &[Complex64] = data;
            par::for_chunks(&mut t, n, |p, line| {
                for (i0, z) in line.iter_mut().enumerate() {
                    *z = src[i0 * pencils + p];
                }
                // Zero pencils are common in padded spectra.
                if line.iter().all(|z| *z == Complex64::default()) {
                    return;
                }
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(line, &mut scratch);
            });
        }
        par::for_chunks(data, pencils, |i0, plane| {
            for (p, z) in plane.iter_mut().enumerate() {
                *z = t[p * n + i0];
            }
        });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_odd_and_even_sizes() {
        for n in [4usize, 6, 9, 12] {
            let p = plan(n);
            let data: Vec<f64> = (0..n * n * n).map(|i| ((i * 7919) % 101) as f64 / 13.0 - 3.0).collect();
            let back = p.inverse(&p.forward(&data));
            for (a, b) in data.iter().zip(&back) {
                assert!((a - b).abs() < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn single_mode_lands_on_its_coefficient() {
        let n = 8;
        let p = plan(n);
        let dx = 2.0 * std::f64::consts::PI / n as f64;
        let mut data = vec![0.0; n * n * n];
        for j0 in 0..n {
            for j1 in 0..n {
                for j2 in 0..n {
                    let x = [j0 as f64 * dx, j1 as f64 * dx, j2 as f64 * dx];
                    data[(j0 * n + j1) * n + j2] = (x[0] + 2.0 * x[1] - x[2]).cos();
                }
            }
        }
        let spec = p.forward(&data);
        let h = n / 2 + 1;
        // cos(k·x) has coefficient 1/2 at k and -k; k = (1,2,-1) ⇒ stored as -k = (-1,-2,1)
        let idx = ((n - 1) * n + (n - 2)) * h + 1;
        assert!((spec[idx].re - 0.5).abs() < 1e-14);
        let total: f64 = spec.iter().map(|z| z.norm()).sum();
        assert!((total - 0.5).abs() < 1e-12);
    }
}
