use std::collections::HashMap;

use super::ParticleEnsemble;
use crate::error::{Error, Result};

/// Histogram estimate of `‖f‖_{L^r}` over phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct LrEstimate {
    pub value: f64,
    /// Three-sigma statistical error of `value` (zero for `r = 1`).
    pub error_bound: f64,
    pub occupied_bins: usize,
}

/// Bin markers on a phase-space grid with cell widths
/// `[hx, hx, hx, hv, hv, hv]` (given per coordinate) and take the discrete
/// `L^r` norm of the binned density. For `r = 1` the value is `Σw`.
pub fn estimate_lr_norm(ens: &ParticleEnsemble, r: f64, bin_widths: [f64; 6]) -> Result<LrEstimate> {
    if !(r >= 1.0) {
        return Err(Error::param("r", "must lie in [1, ∞]"));
    }
    if bin_widths.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
        return Err(Error::param("bin_widths", "must be positive and finite"));
    }
    if r == 1.0 {
        return Ok(LrEstimate {
            value: ens.total_weight(),
            error_bound: 0.0,
            occupied_bins: 0,
        });
    }
    let cell: f64 = bin_widths.iter().product();
    let mut bins: HashMap<[i64; 6], (f64, u64)> = HashMap::new();
    for p in 0..ens.len() {
        let x = ens.positions()[p];
        let v = ens.velocities()[p];
        let mut key = [0i64; 6];
        for d in 0..3 {
            key[d] = (x[d] / bin_widths[d]).floor() as i64;
            key[d + 3] = (v[d] / bin_widths[d + 3]).floor() as i64;
        }
        let e = bins.entry(key).or_insert((0.0, 0));
        e.0 += ens.weights()[p];
        e.1 += 1;
    }
    let mut cells: Vec<(f64, u64)> = bins.into_values().map(|(w, c)| (w / cell, c)).collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let occupied = cells.len();
    if r.is_infinite() {
        let (rho, count) = cells.last().copied().unwrap_or((0.0, 1));
        // the maximum over many noisy bins sits about √(2 ln N) sigmas high
        let sigmas = 3.0 + (2.0 * (occupied.max(2) as f64).ln()).sqrt();
        return Ok(LrEstimate {
            value: rho,
            error_bound: sigmas * rho / (count as f64).sqrt(),
            occupied_bins: occupied,
        });
    }
    let mut s = 0.0;
    let mut var = 0.0;
    for &(rho, count) in &cells {
        let t = rho.powf(r) * cell;
        s += t;
        var += (r * t).powi(2) / count as f64;
    }
    let value = s.powf(1.0 / r);
    let rel = if s > 0.0 { var.sqrt() / (r * s) } else { 0.0 };
    Ok(LrEstimate {
        value,
        error_bound: 3.0 * rel * value,
        occupied_bins: occupied,
    })
}
