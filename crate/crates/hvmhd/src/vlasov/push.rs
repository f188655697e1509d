use super::{cross, wrap, FieldSampler, ParticleEnsemble};
use crate::error::{Error, Result};
use crate::par;
use crate::spectral::VectorField;

/// Rotate `w` about the unit vector `axis` by `angle` (Rodrigues).
#[inline]
fn rotate(w: [f64; 3], axis: [f64; 3], angle: f64) -> [f64; 3] {
    let (s, c) = angle.sin_cos();
    let kxw = cross(axis, w);
    let kdw = axis[0] * w[0] + axis[1] * w[1] + axis[2] * w[2];
    let mut out = [0.0; 3];
    for d in 0..3 {
        out[d] = w[d] * c + kxw[d] * s + axis[d] * kdw * (1.0 - c);
    }
    out
}

/// Advance markers through `Ẋ = V`, `V̇ = (V − U(X))×B(X)`.
pub fn push_particles(ens: &mut ParticleEnsemble, u: &VectorField, b: &VectorField, dt: f64) -> Result<()> {
    push_particles_with(ens, u, b, dt, 1.0)
}

/// As [`push_particles`] with the force scaled by `charge_to_mass`.
pub fn push_particles_with(
    ens: &mut ParticleEnsemble,
    u: &VectorField,
    b: &VectorField,
    dt: f64,
    charge_to_mass: f64,
) -> Result<()> {
    u.grid().check_same(&b.grid())?;
    push_in_samplers(ens, &FieldSampler::new(u), &FieldSampler::new(b), dt, charge_to_mass)
}

/// Drift `dt/2`, exact rotation of `V − U` about `B` over `dt`, drift `dt/2`.
pub fn push_in_samplers(
    ens: &mut ParticleEnsemble,
    u: &FieldSampler,
    b: &FieldSampler,
    dt: f64,
    charge_to_mass: f64,
) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::param("dt", "must be positive and finite"));
    }
    if !u.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            t: f64::NAN,
            what: "field passed to the particle push".into(),
        });
    }
    let half = 0.5 * dt;
    let (x, v) = ens.parts_mut();
    par::for_each_pair(x, v, |_, xp, vp| {
        let mut p = [0.0; 3];
        for d in 0..3 {
            p[d] = wrap(xp[d] + half * vp[d]);
        }
        let bp = b.sample(p);
        let bmag = (bp[0] * bp[0] + bp[1] * bp[1] + bp[2] * bp[2]).sqrt();
        if bmag > 0.0 {
            let up = u.sample(p);
            let axis = [bp[0] / bmag, bp[1] / bmag, bp[2] / bmag];
            let rel = [vp[0] - up[0], vp[1] - up[1], vp[2] - up[2]];
            let r = rotate(rel, axis, -charge_to_mass * bmag * dt);
            for d in 0..3 {
                vp[d] = up[d] + r[d];
            }
        }
        for d in 0..3 {
            xp[d] = wrap(p[d] + half * vp[d]);
        }
    });
    Ok(())
}
