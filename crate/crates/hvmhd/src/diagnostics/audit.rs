use super::energy::{conversion_rates, particle_exchange_rate};
use crate::coupled::PlasmaState;
use crate::error::{Error, Result};

/// Per-channel energies and the rates that should drive them.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AuditFrame {
    pub t: f64,
    pub e_fluid: f64,
    pub e_mag: f64,
    pub e_particles: f64,
    /// `R₁` seen by the fluid (grid moments).
    pub r1_fluid: f64,
    /// `R₁` seen by the markers (interpolated fields).
    pub r1_particles: f64,
    pub r2: f64,
    pub dissipation_u: f64,
    pub dissipation_b: f64,
}

impl AuditFrame {
    pub fn from_state(state: &PlasmaState) -> Self {
        let c = &state.constants;
        let (e_fluid, e_mag) = c.field_energies(&state.u, &state.b);
        let (r1_fluid, r2) = conversion_rates(state);
        let (dissipation_u, dissipation_b) = c.dissipation(&state.u, &state.b);
        AuditFrame {
            t: state.t,
            e_fluid,
            e_mag,
            e_particles: c.particle_energy(&state.particles),
            r1_fluid,
            r1_particles: particle_exchange_rate(state),
            r2,
            dissipation_u,
            dissipation_b,
        }
    }
}

/// Largest mismatch between centred differences of each energy and its
/// ledger rate, over the interior frames.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AuditReport {
    /// `|Ė_particles + R₁|`.
    pub particles: f64,
    /// `|Ė_fluid − R₁ + R₂ + D_U|`.
    pub fluid: f64,
    /// `|Ė_mag − R₂ + D_B|`.
    pub magnetic: f64,
}

pub fn energy_exchange_audit(history: &[AuditFrame]) -> Result<AuditReport> {
    if history.len() < 3 {
        return Err(Error::structural(format!(
            "energy audit needs at least 3 frames, got {}",
            history.len()
        )));
    }
    let mut out = AuditReport::default();
    for w in history.windows(3) {
        let (a, m, b) = (&w[0], &w[1], &w[2]);
        let h = b.t - a.t;
        if !(h > 0.0) {
            return Err(Error::structural("audit frames must have increasing times"));
        }
        let rate = |f: fn(&AuditFrame) -> f64| (f(b) - f(a)) / h;
        let p = rate(|f| f.e_particles) + m.r1_particles;
        let fl = rate(|f| f.e_fluid) - m.r1_fluid + m.r2 + m.dissipation_u;
        let mg = rate(|f| f.e_mag) - m.r2 + m.dissipation_b;
        out.particles = out.particles.max(p.abs());
        out.fluid = out.fluid.max(fl.abs());
        out.magnetic = out.magnetic.max(mg.abs());
    }
    Ok(out)
}
