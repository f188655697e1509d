//! Interpolation bound for velocity moments of a bounded density with
//! finite kinetic energy.
//!
//! Splitting `∫|v|^k f dv` at speed `N` gives
//! `m_k ≤ 4π N^{3+k} F/(3+k) + N^{k−2} m₂` with `F = ‖f‖_∞`. Minimizing over
//! `N` (at `N⁵ = (2−k) m₂/(4πF)`) yields the pointwise estimate
//! `m_k ≤ c_k F^{(2−k)/5} m₂^{(3+k)/5}`,
//!
//! ```text
//! c_k = 5/(3+k) · ((2−k)/(4π))^{−(2−k)/5},   c_2 = 1,
//! ```
//!
//! and raising to the power `5/(3+k)` and integrating in `x` gives
//! `‖m_k‖_{5/(3+k)} ≤ c_k F^{(2−k)/5} (2E)^{(3+k)/5}` with `2E = ∫m₂`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::spectral::Grid;
use crate::vlasov::{deposit_speed_moment, particle_energy, ParticleEnsemble};

/// Relative slack allowed in [`BoundReport::holds`].
pub const BOUND_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundReport {
    pub k: f64,
    pub lhs_norm: f64,
    pub rhs_bound: f64,
    pub ratio: f64,
    pub holds: bool,
}

fn check_k(k: f64) -> Result<()> {
    if !(0.0..=2.0).contains(&k) {
        return Err(Error::param("k", format!("must lie in [0, 2], got {k}")));
    }
    Ok(())
}

/// `c_k` from the optimal split speed.
pub fn moment_bound_constant(k: f64) -> Result<f64> {
    check_k(k)?;
    if k == 2.0 {
        return Ok(1.0);
    }
    let a = (2.0 - k) / 5.0;
    Ok(5.0 / (3.0 + k) * ((2.0 - k) / (4.0 * PI)).powf(-a))
}

/// Compare `‖m_k‖_{5/(3+k)}` from node values of `m_k` on `grid` with
/// `c_k f_inf^{(2−k)/5} (2 e_particles)^{(3+k)/5}`.
pub fn moment_bound_report(nodes: &[f64], grid: Grid, f_inf: f64, e_particles: f64, k: f64) -> Result<BoundReport> {
    check_k(k)?;
    if !(f_inf > 0.0 && f_inf.is_finite()) {
        return Err(Error::param("f_inf", "must be positive and finite"));
    }
    if !(e_particles >= 0.0 && e_particles.is_finite()) {
        return Err(Error::param("e_particles", "must be nonnegative and finite"));
    }
    if nodes.len() != grid.physical_len() {
        return Err(Error::structural("moment array does not match the grid"));
    }
    let p = 5.0 / (3.0 + k);
    let sum: f64 = nodes.iter().map(|m| m.abs().powf(p)).sum();
    let lhs_norm = (sum * grid.cell_volume()).powf(1.0 / p);
    let rhs_bound =
        moment_bound_constant(k)? * f_inf.powf((2.0 - k) / 5.0) * (2.0 * e_particles).powf((3.0 + k) / 5.0);
    let ratio = if rhs_bound > 0.0 {
        lhs_norm / rhs_bound
    } else if lhs_norm == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    Ok(BoundReport {
        k,
        lhs_norm,
        rhs_bound,
        ratio,
        holds: lhs_norm <= rhs_bound * (1.0 + BOUND_TOLERANCE),
    })
}

/// Bound report for the CIC-deposited moment of a marker ensemble.
pub fn ensemble_bound_report(ens: &ParticleEnsemble, grid: Grid, f_inf: f64, k: f64) -> Result<BoundReport> {
    check_k(k)?;
    let nodes = deposit_speed_moment(ens, grid, k);
    moment_bound_report(&nodes, grid, f_inf, particle_energy(ens), k)
}
