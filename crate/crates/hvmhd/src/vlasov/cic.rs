//! Cloud-in-cell weights shared by interpolation and deposition.

use crate::spectral::{Grid, VectorField};

/// Node indices and weights of the eight cells touching a point.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Stencil {
    idx: [[usize; 2]; 3],
    wt: [[f64; 2]; 3],
    n: usize,
}

impl Stencil {
    pub(crate) fn new(x: [f64; 3], n: usize, dx: f64) -> Self {
        let mut idx = [[0; 2]; 3];
        let mut wt = [[0.0; 2]; 3];
        for d in 0..3 {
            let s = x[d] / dx;
            let fl = s.floor();
            let f = s - fl;
            let i = (fl as i64).rem_euclid(n as i64) as usize;
            idx[d] = [i, (i + 1) % n];
            wt[d] = [1.0 - f, f];
        }
        Stencil { idx, wt, n }
    }

    /// Visit `(flat node index, weight)` for the eight corners.
    #[inline]
    pub(crate) fn for_each(&self, mut f: impl FnMut(usize, f64)) {
        let n = self.n;
        for a in 0..2 {
            for b in 0..2 {
                let wab = self.wt[0][a] * self.wt[1][b];
                let base = (self.idx[0][a] * n + self.idx[1][b]) * n;
                for c in 0..2 {
                    f(base + self.idx[2][c], wab * self.wt[2][c]);
                }
            }
        }
    }
}

/// Physical node values of a vector field, sampled by trilinear interpolation.
#[derive(Clone, Debug)]
pub struct FieldSampler {
    n: usize,
    dx: f64,
    data: [Vec<f64>; 3],
}

impl FieldSampler {
    pub fn new(v: &VectorField) -> Self {
        let g = v.grid();
        FieldSampler {
            n: g.n(),
            dx: g.dx(),
            data: v.to_physical(),
        }
    }

    pub fn from_nodes(grid: Grid, data: [Vec<f64>; 3]) -> Self {
        FieldSampler {
            n: grid.n(),
            dx: grid.dx(),
            data,
        }
    }

    pub fn max_abs(&self) -> f64 {
        let len = self.data[0].len();
        crate::par::max(len, |i| {
            let (a, b, c) = (self.data[0][i], self.data[1][i], self.data[2][i]);
            (a * a + b * b + c * c).sqrt()
        })
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|c| c.iter().all(|v| v.is_finite()))
    }

    #[inline]
    pub fn sample(&self, x: [f64; 3]) -> [f64; 3] {
        let st = Stencil::new(x, self.n, self.dx);
        let mut out = [0.0; 3];
        st.for_each(|j, w| {
            out[0] += w * self.data[0][j];
            out[1] += w * self.data[1][j];
            out[2] += w * self.data[2][j];
        });
        out
    }
}
