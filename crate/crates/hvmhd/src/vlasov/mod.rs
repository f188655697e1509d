//! Marker representation of the energetic-particle density and its transport.

mod cic;
mod deposit;
mod lr;
mod push;

use std::f64::consts::PI;

pub use cic::FieldSampler;
pub use deposit::{deposit_moments, deposit_speed_moment, Moments};
pub use lr::{estimate_lr_norm, LrEstimate};
pub use push::{push_in_samplers, push_particles, push_particles_with};

use crate::error::{Error, Result};
use crate::par;

/// Weighted markers `(x_p, v_p, w_p)` with `x_p ∈ [0, 2π)³` and `w_p ≥ 0`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParticleEnsemble {
    x: Vec<[f64; 3]>,
    v: Vec<[f64; 3]>,
    w: Vec<f64>,
}

pub(crate) fn wrap(s: f64) -> f64 {
    let p = 2.0 * PI;
    let r = s.rem_euclid(p);
    if r >= p {
        0.0
    } else {
        r
    }
}

impl ParticleEnsemble {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Positions are wrapped into the fundamental cell.
    pub fn new(x: Vec<[f64; 3]>, v: Vec<[f64; 3]>, w: Vec<f64>) -> Result<Self> {
        if x.len() != v.len() || x.len() != w.len() {
            return Err(Error::structural("marker arrays differ in length"));
        }
        if w.iter().any(|&wi| !(wi >= 0.0) || !wi.is_finite()) {
            return Err(Error::Input("marker weights must be finite and nonnegative".into()));
        }
        if x.iter().chain(v.iter()).any(|p| p.iter().any(|c| !c.is_finite())) {
            return Err(Error::Input("marker coordinates must be finite".into()));
        }
        let x = x.into_iter().map(|p| [wrap(p[0]), wrap(p[1]), wrap(p[2])]).collect();
        Ok(ParticleEnsemble { x, v, w })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.x
    }

    pub fn velocities(&self) -> &[[f64; 3]] {
        &self.v
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut [[f64; 3]], &mut [[f64; 3]]) {
        (&mut self.x, &mut self.v)
    }

    pub fn total_weight(&self) -> f64 {
        par::sum(self.len(), |i| self.w[i])
    }

    /// `Σ w v`.
    pub fn momentum(&self) -> [f64; 3] {
        par::sum3(self.len(), |i| {
            let (w, v) = (self.w[i], self.v[i]);
            [w * v[0], w * v[1], w * v[2]]
        })
    }

    /// `Σ w |v|`.
    pub fn speed_sum(&self) -> f64 {
        par::sum(self.len(), |i| self.w[i] * norm(self.v[i]))
    }

    pub fn max_speed(&self) -> f64 {
        par::max(self.len(), |i| norm(self.v[i]))
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.v.iter()).all(|p| p.iter().all(|c| c.is_finite()))
    }
}

#[inline]
pub(crate) fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

#[inline]
pub(crate) fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// `½ Σ w |v|²`.
pub fn particle_energy(ens: &ParticleEnsemble) -> f64 {
    0.5 * par::sum(ens.len(), |i| {
        let v = ens.v[i];
        ens.w[i] * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
    })
}

/// `Σ w v·(U(x)×B(x))` with both fields interpolated to the markers.
pub fn particle_work_rate(ens: &ParticleEnsemble, u: &FieldSampler, b: &FieldSampler) -> f64 {
    par::sum(ens.len(), |i| {
        let x = ens.x[i];
        let ub = cross(u.sample(x), b.sample(x));
        let v = ens.v[i];
        ens.w[i] * (v[0] * ub[0] + v[1] * ub[1] + v[2] * ub[2])
    })
}

/// Speed bound `G = (C1² e^T + (e^T − 1) C2⁴)^{1/2}` for markers whose
/// initial speeds are at most `C1` in fields bounded by `C2`.
pub fn support_radius_bound(t: f64, c1: f64, c2: f64) -> Result<f64> {
    for (name, val) in [("T", t), ("C1", c1), ("C2", c2)] {
        if !(val >= 0.0) {
            return Err(Error::param(name, "must be nonnegative"));
        }
    }
    let e = t.exp();
    Ok((c1 * c1 * e + (e - 1.0) * c2.powi(4)).sqrt())
}
