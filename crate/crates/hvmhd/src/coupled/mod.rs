//! The mollified hybrid system.
//!
//! Markers follow `Ẋ = V`, `V̇ = a_h (V − U^ε(X))×B^ε(X)` with `a_h = q_h/m_h`;
//! the fields obey
//!
//! ```text
//! ∂t U = P[−(U^ε·∇)U + (ϱ̄μ₀)⁻¹(B^ε·∇)B + (q_h/ϱ̄)(n U×B^ε + (B^ε×K)^ε)] + (κ/ϱ̄)ΔU
//! ∂t B = P[−(U^ε·∇)B + (B^ε·∇)U] + (η/μ₀)ΔB
//! ```
//!
//! with `n`, `K` the zeroth and first velocity moments of the markers.

mod fixed_point;
mod rhs;
mod run;
mod step;

pub use fixed_point::{apply_f, fixed_point_solve, FieldTrajectory, FixedPointResult, MapOutput};
pub use rhs::{rhs_induction, rhs_momentum};
pub use run::{
    checkpoint_name, initial_state, run_simulation, run_simulation_with, RunArtifacts, RunOptions, CONFIG_NAME, CSV_NAME,
    FINAL_CHECKPOINT,
};
pub use step::{cfl_dt, step};

use crate::error::{Error, Result};
use crate::mollifier::MollifierSpec;
use crate::spectral::{Grid, VectorField};
use crate::vlasov::{particle_energy, ParticleEnsemble};

/// Charge and mass of the energetic species, transport coefficients,
/// magnetic constant and bulk density.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalConstants {
    pub q_h: f64,
    pub m_h: f64,
    pub kappa: f64,
    pub eta: f64,
    pub mu0: f64,
    pub rho_bar: f64,
}

impl PhysicalConstants {
    pub fn unity() -> Self {
        PhysicalConstants {
            q_h: 1.0,
            m_h: 1.0,
            kappa: 1.0,
            eta: 1.0,
            mu0: 1.0,
            rho_bar: 1.0,
        }
    }

    pub fn new(q_h: f64, m_h: f64, kappa: f64, eta: f64, mu0: f64, rho_bar: f64) -> Result<Self> {
        let c = PhysicalConstants {
            q_h,
            m_h,
            kappa,
            eta,
            mu0,
            rho_bar,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("q_h", self.q_h),
            ("m_h", self.m_h),
            ("kappa", self.kappa),
            ("eta", self.eta),
            ("mu0", self.mu0),
            ("rho_bar", self.rho_bar),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, "must be positive and finite"));
            }
        }
        Ok(())
    }

    pub fn charge_to_mass(&self) -> f64 {
        self.q_h / self.m_h
    }

    /// `κ/ϱ̄`.
    pub fn viscosity(&self) -> f64 {
        self.kappa / self.rho_bar
    }

    /// `η/μ₀`.
    pub fn magnetic_diffusivity(&self) -> f64 {
        self.eta / self.mu0
    }

    pub(crate) fn lorentz(&self) -> f64 {
        1.0 / (self.rho_bar * self.mu0)
    }

    pub(crate) fn coupling(&self) -> f64 {
        self.q_h / self.rho_bar
    }

    /// Kinetic and magnetic energy `(½ϱ̄‖U‖², ‖B‖²/(2μ₀))`.
    pub fn field_energies(&self, u: &VectorField, b: &VectorField) -> (f64, f64) {
        (0.5 * self.rho_bar * u.norm_l2_sq(), 0.5 * b.norm_l2_sq() / self.mu0)
    }

    /// `m_h · ½Σw|v|²`.
    pub fn particle_energy(&self, ens: &ParticleEnsemble) -> f64 {
        self.m_h * particle_energy(ens)
    }

    /// Viscous and resistive dissipation rates `(κ‖∇U‖², (η/μ₀²)‖∇B‖²)`.
    pub fn dissipation(&self, u: &VectorField, b: &VectorField) -> (f64, f64) {
        (
            self.kappa * u.grad_norm_sq(),
            self.eta / (self.mu0 * self.mu0) * b.grad_norm_sq(),
        )
    }
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::unity()
    }
}

/// Fields, markers, mollifier and constants at time `t`.
#[derive(Clone, Debug)]
pub struct PlasmaState {
    pub t: f64,
    pub u: VectorField,
    pub b: VectorField,
    pub particles: ParticleEnsemble,
    pub mollifier: MollifierSpec,
    pub constants: PhysicalConstants,
}

impl PlasmaState {
    /// State at `t = 0`; `u` and `b` must be divergence-free.
    pub fn new(
        mut u: VectorField,
        mut b: VectorField,
        particles: ParticleEnsemble,
        mollifier: MollifierSpec,
        constants: PhysicalConstants,
    ) -> Result<Self> {
        u.grid().check_same(&b.grid())?;
        constants.validate()?;
        u.mark_divergence_free()
            .map_err(|e| Error::Input(format!("initial U: {e}")))?;
        b.mark_divergence_free()
            .map_err(|e| Error::Input(format!("initial B: {e}")))?;
        Ok(PlasmaState {
            t: 0.0,
            u,
            b,
            particles,
            mollifier,
            constants,
        })
    }

    pub fn grid(&self) -> Grid {
        self.u.grid()
    }

    /// `(U^ε, B^ε)`.
    pub fn mollified_fields(&self) -> (VectorField, VectorField) {
        (self.mollifier.mollify(&self.u), self.mollifier.mollify(&self.b))
    }

    /// Sum of fluid, magnetic and particle energies.
    pub fn total_energy(&self) -> f64 {
        let (ef, em) = self.constants.field_energies(&self.u, &self.b);
        ef + em + self.constants.particle_energy(&self.particles)
    }
}

/// Horizon `C_ε · f_∞^{−1/5} · (2E₀)^{−4/5}` on which the linearized map
/// keeps the energy ball invariant.
pub fn tflat(c_eps: f64, f_inf: f64, e0: f64) -> Result<f64> {
    for (name, v) in [("C_eps", c_eps), ("f_inf", f_inf), ("E0", e0)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(name, "must be positive and finite"));
        }
    }
    Ok(c_eps * f_inf.powf(-0.2) * (2.0 * e0).powf(-0.8))
}
