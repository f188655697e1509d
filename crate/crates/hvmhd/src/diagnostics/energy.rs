use crate::coupled::PlasmaState;
use crate::spectral::product;
use crate::vlasov::{deposit_moments, particle_work_rate, FieldSampler, Moments};

/// Energies, exchange rates and the running balance.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyReport {
    pub e_fluid: f64,
    pub e_mag: f64,
    pub e_particles: f64,
    pub e_total: f64,
    /// Particles to fluid.
    pub r1: f64,
    /// Fluid to magnetic field.
    pub r2: f64,
    pub dissipation_rate: f64,
    pub cumulative_dissipation: f64,
    /// `e_total + cumulative_dissipation − e_total(0)`.
    pub balance_residual: f64,
}

/// Instantaneous energies, rates and dissipation; the cumulative fields are zero.
pub fn total_energy(state: &PlasmaState) -> EnergyReport {
    let c = &state.constants;
    let (e_fluid, e_mag) = c.field_energies(&state.u, &state.b);
    let e_particles = c.particle_energy(&state.particles);
    let (du, db) = c.dissipation(&state.u, &state.b);
    let (r1, r2) = conversion_rates(state);
    EnergyReport {
        e_fluid,
        e_mag,
        e_particles,
        e_total: e_fluid + e_mag + e_particles,
        r1,
        r2,
        dissipation_rate: du + db,
        cumulative_dissipation: 0.0,
        balance_residual: 0.0,
    }
}

/// `(R₁, R₂)` with moments deposited from the state's markers.
pub fn conversion_rates(state: &PlasmaState) -> (f64, f64) {
    if state.particles.is_empty() {
        return (0.0, magnetic_rate(state));
    }
    conversion_rates_with(state, &deposit_moments(&state.particles, state.grid()))
}

/// `R₁ = q_h ∫ (U^ε×B^ε)·K`, `R₂ = μ₀⁻¹ ⟨B, (B^ε·∇)U⟩` with the given moments.
pub fn conversion_rates_with(state: &PlasmaState, moments: &Moments) -> (f64, f64) {
    let (ue, be) = state.mollified_fields();
    let r1 = state.constants.q_h * ue.inner(&product::cross(&be, &moments.k));
    (r1, magnetic_rate(state))
}

fn magnetic_rate(state: &PlasmaState) -> f64 {
    let be = state.mollifier.mollify(&state.b);
    state.b.inner(&product::advect(&be, &state.u)) / state.constants.mu0
}

/// Energy the markers lose per unit time, `q_h Σ w v·(U^ε×B^ε)(x_p)`.
pub fn particle_exchange_rate(state: &PlasmaState) -> f64 {
    if state.particles.is_empty() {
        return 0.0;
    }
    let (ue, be) = state.mollified_fields();
    state.constants.q_h * particle_work_rate(&state.particles, &FieldSampler::new(&ue), &FieldSampler::new(&be))
}

/// Total momentum `ϱ̄∫U + m_h Σ w v` and marker mass `Σ w`.
pub fn conserved_quantities(state: &PlasmaState) -> ([f64; 3], f64) {
    let c = &state.constants;
    let fluid = state.u.integral();
    let kinetic = state.particles.momentum();
    let p = [0, 1, 2].map(|i| c.rho_bar * fluid[i] + c.m_h * kinetic[i]);
    (p, state.particles.total_weight())
}

/// Running time integral of the dissipation rate (trapezoidal).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyTracker {
    pub e_total0: f64,
    pub cumulative_dissipation: f64,
    last_t: f64,
    last_rate: f64,
}

impl EnergyTracker {
    pub fn new(state: &PlasmaState) -> Self {
        let c = &state.constants;
        let (du, db) = c.dissipation(&state.u, &state.b);
        EnergyTracker {
            e_total0: state.total_energy(),
            cumulative_dissipation: 0.0,
            last_t: state.t,
            last_rate: du + db,
        }
    }

    /// Resume from stored totals.
    pub fn resume(state: &PlasmaState, e_total0: f64, cumulative_dissipation: f64) -> Self {
        let mut t = Self::new(state);
        t.e_total0 = e_total0;
        t.cumulative_dissipation = cumulative_dissipation;
        t
    }

    /// Advance the integral to `state.t`.
    pub fn update(&mut self, state: &PlasmaState) {
        let (du, db) = state.constants.dissipation(&state.u, &state.b);
        let rate = du + db;
        self.cumulative_dissipation += 0.5 * (state.t - self.last_t) * (rate + self.last_rate);
        self.last_t = state.t;
        self.last_rate = rate;
    }

    /// Full report at the tracker's current time.
    pub fn report(&self, state: &PlasmaState) -> EnergyReport {
        let mut r = total_energy(state);
        r.cumulative_dissipation = self.cumulative_dissipation;
        r.balance_residual = r.e_total + self.cumulative_dissipation - self.e_total0;
        r
    }
}

/// One line of the diagnostics table.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub energy: EnergyReport,
    pub div_u: f64,
    pub div_b: f64,
    pub momentum: [f64; 3],
    pub mass: f64,
}

pub fn diagnostics_row(state: &PlasmaState, tracker: &EnergyTracker) -> DiagnosticsRow {
    let (momentum, mass) = conserved_quantities(state);
    DiagnosticsRow {
        t: state.t,
        energy: tracker.report(state),
        div_u: state.u.divergence_residual(),
        div_b: state.b.divergence_residual(),
        momentum,
        mass,
    }
}
