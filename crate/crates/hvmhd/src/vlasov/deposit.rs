use super::cic::Stencil;
use super::{norm, ParticleEnsemble};
use crate::par;
use crate::spectral::{Grid, ScalarField, VectorField};

/// Velocity moments of the marker density on the grid.
#[derive(Clone, Debug)]
pub struct Moments {
    /// `∫ f dv`.
    pub n: ScalarField,
    /// `∫ v f dv` (not divergence-free).
    pub k: VectorField,
    /// `∫ |v|² f dv`.
    pub sigma2: ScalarField,
}

/// Upper bound on private accumulation buffers, fixed so that the merge
/// order does not depend on the thread count.
const MAX_BUFFERS: usize = 8;
const MIN_MARKERS_PER_BUFFER: usize = 4096;

/// Deposit `q(p)` (`N` values per marker) by CIC, returning `N` node arrays
/// already divided by the cell volume.
fn deposit_nodes<const N: usize, Q>(ens: &ParticleEnsemble, grid: Grid, q: Q) -> [Vec<f64>; N]
where
    Q: Fn(usize) -> [f64; N] + Sync + Send,
{
    let len = grid.physical_len();
    let n = grid.n();
    let dx = grid.dx();
    let buffers = (ens.len() / MIN_MARKERS_PER_BUFFER).clamp(1, MAX_BUFFERS);
    let chunk = ens.len().div_ceil(buffers).max(1);
    let partials = par::map_ranges(ens.len(), chunk, |r| {
        let mut acc: [Vec<f64>; N] = std::array::from_fn(|_| vec![0.0; len]);
        for p in r {
            let vals = q(p);
            Stencil::new(ens.positions()[p], n, dx).for_each(|j, wt| {
                for c in 0..N {
                    acc[c][j] += wt * vals[c];
                }
            });
        }
        acc
    });
    let inv = 1.0 / grid.cell_volume();
    let mut out: [Vec<f64>; N] = std::array::from_fn(|_| vec![0.0; len]);
    for part in &partials {
        for c in 0..N {
            let (dst, src) = (&mut out[c], &part[c]);
            par::for_chunks(dst, par::REDUCE_CHUNK, |ci, chunk| {
                let base = ci * par::REDUCE_CHUNK;
                for (j, d) in chunk.iter_mut().enumerate() {
                    *d += src[base + j];
                }
            });
        }
    }
    for c in out.iter_mut() {
        par::for_chunks(c, par::REDUCE_CHUNK, |_, chunk| chunk.iter_mut().for_each(|d| *d *= inv));
    }
    out
}

/// CIC deposition of `w`, `w v` and `w |v|²`, transformed to spectral space.
pub fn deposit_moments(ens: &ParticleEnsemble, grid: Grid) -> Moments {
    let [n, k0, k1, k2, s2] = deposit_nodes::<5, _>(ens, grid, |p| {
        let w = ens.weights()[p];
        let v = ens.velocities()[p];
        [w, w * v[0], w * v[1], w * v[2], w * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])]
    });
    let scalar = |d: Vec<f64>| ScalarField::from_physical(grid, &d).expect("node array matches grid");
    Moments {
        n: scalar(n),
        k: VectorField::new([scalar(k0), scalar(k1), scalar(k2)]).expect("same grid"),
        sigma2: scalar(s2),
    }
}

/// Node values of `∫|v|^order f dv` by CIC deposition.
pub fn deposit_speed_moment(ens: &ParticleEnsemble, grid: Grid, order: f64) -> Vec<f64> {
    let [m] = deposit_nodes::<1, _>(ens, grid, |p| {
        let s = norm(ens.velocities()[p]);
        let f = if order == 0.0 { 1.0 } else { s.powf(order) };
        [ens.weights()[p] * f]
    });
    m
}
