use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Cubic periodic grid of side 2π with `n` points (and modes) per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    n: usize,
    dealias_fraction: f64,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_dealias(n, 1.0)
    }

    /// `dealias_fraction` scales the band kept after each product:
    /// modes with `|k_i| < fraction·n/2` on every axis survive.
    pub fn with_dealias(n: usize, dealias_fraction: f64) -> Result<Self> {
        if n < 4 || n % 2 != 0 {
            return Err(Error::param("n", format!("must be even and >= 4, got {n}")));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            return Err(Error::param(
                "dealias_fraction",
                format!("must lie in (0, 1], got {dealias_fraction}"),
            ));
        }
        Ok(Grid { n, dealias_fraction })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Length of the stored half axis, `n/2 + 1`.
    pub fn half(&self) -> usize {
        self.n / 2 + 1
    }

    pub fn spectral_len(&self) -> usize {
        self.n * self.n * self.half()
    }

    pub fn physical_len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(3)
    }

    /// Volume of the torus, (2π)³.
    pub fn volume() -> f64 {
        (2.0 * PI).powi(3)
    }

    pub fn nyquist(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Signed wavenumber of a full-axis index.
    pub fn wavenumber(&self, i: usize) -> i64 {
        wavenumber(i, self.n)
    }

    /// Wavevector of a half-spectrum flat index.
    pub fn k_of(&self, idx: usize) -> [i64; 3] {
        let h = self.half();
        let i2 = idx % h;
        let i1 = (idx / h) % self.n;
        let i0 = idx / (h * self.n);
        [self.wavenumber(i0), self.wavenumber(i1), i2 as i64]
    }

    /// Half-spectrum flat index of `k`, if `k` is in the stored half.
    pub fn index_of(&self, k: [i64; 3]) -> Option<usize> {
        let n = self.n as i64;
        let inside = |v: i64| v > -n / 2 && v <= n / 2;
        if !(inside(k[0]) && inside(k[1]) && k[2] >= 0 && k[2] <= n / 2) {
            return None;
        }
        let wrap = |v: i64| v.rem_euclid(n) as usize;
        Some((wrap(k[0]) * self.n + wrap(k[1])) * self.half() + k[2] as usize)
    }

    /// Multiplicity of a stored coefficient in the full spectrum.
    pub fn hermitian_weight(&self, idx: usize) -> f64 {
        let i2 = idx % self.half();
        if i2 == 0 || i2 == self.n / 2 {
            1.0
        } else {
            2.0
        }
    }

    pub fn is_nyquist(&self, k: [i64; 3]) -> bool {
        let ny = self.nyquist();
        k.iter().any(|&c| c.abs() == ny)
    }

    /// Whether `k` survives product truncation.
    pub fn in_product_band(&self, k: [i64; 3]) -> bool {
        let cut = self.dealias_fraction * self.n as f64 / 2.0;
        k.iter().all(|&c| (c.abs() as f64) < cut)
    }

    /// Side of the zero-padded grid used for products, the smallest even
    /// integer ≥ 3n/2.
    pub fn padded_n(&self) -> usize {
        2 * (3 * self.n).div_ceil(4)
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::structural(format!(
                "grid mismatch: n = {} vs n = {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

pub(crate) fn wavenumber(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}
