use super::rhs::{Sources, Transport};
use super::step::{check_fields, half_push, if_rk3};
use super::PlasmaState;
use crate::error::{Error, Result};
use crate::spectral::{leray_project, product, VectorField, DIV_FREE_TOL};
use crate::vlasov::{deposit_moments, ParticleEnsemble};

/// Fields `(U, B)` on a uniform time grid starting at 0.
#[derive(Clone, Debug)]
pub struct FieldTrajectory {
    pub times: Vec<f64>,
    pub u: Vec<VectorField>,
    pub b: Vec<VectorField>,
}

impl FieldTrajectory {
    /// `(u, b)` held fixed on `steps + 1` equally spaced times in `[0, horizon]`.
    pub fn constant(u: &VectorField, b: &VectorField, horizon: f64, steps: usize) -> Self {
        let dt = horizon / steps as f64;
        FieldTrajectory {
            times: (0..=steps).map(|k| k as f64 * dt).collect(),
            u: vec![u.clone(); steps + 1],
            b: vec![b.clone(); steps + 1],
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// `sup_t (‖ΔU‖² + ‖ΔB‖²)^{1/2}`.
    pub fn max_distance(&self, other: &FieldTrajectory) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::structural("trajectories have different lengths"));
        }
        Ok((0..self.len())
            .map(|k| {
                (self.u[k].sub(&other.u[k]).norm_l2_sq() + self.b[k].sub(&other.b[k]).norm_l2_sq()).sqrt()
            })
            .fold(0.0, f64::max))
    }

    /// Linear interpolation between frames `k` and `k + 1` at fraction `s`.
    fn at(&self, k: usize, s: f64) -> (VectorField, VectorField) {
        if s == 0.0 {
            return (self.u[k].clone(), self.b[k].clone());
        }
        if s == 1.0 {
            return (self.u[k + 1].clone(), self.b[k + 1].clone());
        }
        let mix = |a: &VectorField, b: &VectorField| {
            let mut out = a.scaled(1.0 - s);
            out.axpy(s, b);
            out
        };
        (mix(&self.u[k], &self.u[k + 1]), mix(&self.b[k], &self.b[k + 1]))
    }
}

/// One application of the linearized map.
#[derive(Clone, Debug)]
pub struct MapOutput {
    pub fields: FieldTrajectory,
    /// Markers at the final time.
    pub particles: ParticleEnsemble,
    /// `R(t_k) = q_h ∫ (U − Ũ)^ε · (B̃^ε × K) dx` at each frame.
    pub remainder: Vec<f64>,
    /// Total energy at each frame.
    pub energy: Vec<f64>,
    /// Dissipation rate at each frame.
    pub dissipation: Vec<f64>,
}

impl MapOutput {
    pub fn max_remainder(&self) -> f64 {
        self.remainder.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    /// `E(t_k) + ∫₀^{t_k} D − E(0) − ∫₀^{t_k} R` with trapezoidal time integrals.
    pub fn energy_defect(&self) -> Vec<f64> {
        let t = &self.fields.times;
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for k in 1..t.len() {
            let h = t[k] - t[k - 1];
            acc += 0.5 * h * (self.dissipation[k] + self.dissipation[k - 1]);
            acc -= 0.5 * h * (self.remainder[k] + self.remainder[k - 1]);
            out.push(self.energy[k] + acc - self.energy[0]);
        }
        out
    }
}

fn steps_for(horizon: f64, dt: f64) -> Result<usize> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("T", "must be positive and finite"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", "must be positive and finite"));
    }
    let steps = (horizon / dt).round().max(1.0);
    if ((steps * dt - horizon) / horizon).abs() > 1e-9 {
        return Err(Error::param("dt", format!("must divide the horizon {horizon}")));
    }
    Ok(steps as usize)
}

fn remainder(
    tr: &Transport,
    u: &VectorField,
    b_eps_sur: &VectorField,
    u_sur: &VectorField,
    particles: &ParticleEnsemble,
) -> f64 {
    if particles.is_empty() {
        return 0.0;
    }
    let k = deposit_moments(particles, tr.dealias.grid()).k;
    let diff = tr.mollifier.mollify(&u.sub(u_sur));
    tr.constants.q_h * diff.inner(&product::cross(b_eps_sur, &k))
}

/// Solve the marker and field equations driven by the surrogate `(Ũ, B̃)`:
/// markers move in `(Ũ^ε, B̃^ε)`, and `(U, B)` are advected by `Ũ^ε`,
/// stretched and coupled through `B̃^ε`. Surrogate frames must sit at
/// `k·dt`, `k = 0..=T/dt`.
pub fn apply_f(surrogate: &FieldTrajectory, init: &PlasmaState, horizon: f64, dt: f64) -> Result<MapOutput> {
    let steps = steps_for(horizon, dt)?;
    let dt = horizon / steps as f64;
    if surrogate.len() != steps + 1 || surrogate.u.len() != steps + 1 || surrogate.b.len() != steps + 1 {
        return Err(Error::structural(format!(
            "surrogate has {} frames, time grid needs {}",
            surrogate.len(),
            steps + 1
        )));
    }
    for (k, &t) in surrogate.times.iter().enumerate() {
        if (t - k as f64 * dt).abs() > 1e-9 * horizon {
            return Err(Error::structural(format!("surrogate frame {k} at t = {t}, expected {}", k as f64 * dt)));
        }
    }
    let grid = init.grid();
    for k in 0..=steps {
        grid.check_same(&surrogate.u[k].grid())?;
        grid.check_same(&surrogate.b[k].grid())?;
        let r = surrogate.u[k].divergence_residual().max(surrogate.b[k].divergence_residual());
        if r > DIV_FREE_TOL {
            return Err(Error::Input(format!("surrogate frame {k} is not divergence-free (residual {r:.3e})")));
        }
    }

    let c = init.constants;
    let tr = Transport::for_state(init);
    let spec = &init.mollifier;
    let mollified: Vec<(VectorField, VectorField)> = (0..=steps)
        .map(|k| (spec.mollify(&surrogate.u[k]), spec.mollify(&surrogate.b[k])))
        .collect();

    let mut particles = init.particles.clone();
    let mut u = init.u.clone();
    let mut b = init.b.clone();
    let frame = |u: &VectorField, b: &VectorField, p: &ParticleEnsemble, k: usize| {
        let (ef, em) = c.field_energies(u, b);
        let (du, db) = c.dissipation(u, b);
        let r = remainder(&tr, u, &mollified[k].1, &surrogate.u[k], p);
        (ef + em + c.particle_energy(p), du + db, r)
    };
    let (e0, d0, r0) = frame(&u, &b, &particles, 0);
    let mut out = MapOutput {
        fields: FieldTrajectory {
            times: vec![0.0],
            u: vec![u.clone()],
            b: vec![b.clone()],
        },
        particles: ParticleEnsemble::empty(),
        remainder: vec![r0],
        energy: vec![e0],
        dissipation: vec![d0],
    };

    for k in 0..steps {
        half_push(&mut particles, &mollified[k].0, &mollified[k].1, dt, c.charge_to_mass())?;
        let src = Sources::from_ensemble(&tr.dealias, &particles);
        let (u1, b1) = if_rk3(&u, &b, dt, (c.viscosity(), c.magnetic_diffusivity()), |s, uu, bb| {
            let (su, sb) = surrogate.at(k, s);
            tr.tendencies(uu, bb, &spec.mollify(&su), &spec.mollify(&sb), src.as_ref())
        });
        u = leray_project(&u1);
        b = leray_project(&b1);
        let t1 = (k + 1) as f64 * dt;
        check_fields(t1, &u, &b)?;
        half_push(&mut particles, &mollified[k + 1].0, &mollified[k + 1].1, dt, c.charge_to_mass())?;

        let (e, d, r) = frame(&u, &b, &particles, k + 1);
        out.fields.times.push(t1);
        out.fields.u.push(u.clone());
        out.fields.b.push(b.clone());
        out.energy.push(e);
        out.dissipation.push(d);
        out.remainder.push(r);
    }
    out.particles = particles;
    Ok(out)
}

/// Picard iterates of the linearized map with per-iteration diagnostics.
#[derive(Clone, Debug)]
pub struct FixedPointResult {
    /// Last iterate.
    pub output: MapOutput,
    /// `max_t |R|` of each iterate.
    pub remainder_history: Vec<f64>,
    /// `sup_t ‖(U, B)ᵏ⁺¹ − (U, B)ᵏ‖` of each iterate.
    pub change_history: Vec<f64>,
    pub converged: bool,
}

impl FixedPointResult {
    pub fn iterations(&self) -> usize {
        self.change_history.len()
    }
}

/// Iterate `(Ũ, B̃) ← 𝓕(Ũ, B̃)` from the constant-in-time initial fields
/// until the sup-in-time L² change drops below `tol` or `max_iter` is hit.
/// Non-convergence is reported through [`FixedPointResult::converged`].
pub fn fixed_point_solve(
    init: &PlasmaState,
    horizon: f64,
    dt: f64,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointResult> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    let steps = steps_for(horizon, dt)?;
    let mut surrogate = FieldTrajectory::constant(&init.u, &init.b, horizon, steps);
    let mut remainder_history = Vec::new();
    let mut change_history = Vec::new();
    loop {
        let out = apply_f(&surrogate, init, horizon, dt)?;
        let change = out.fields.max_distance(&surrogate)?;
        remainder_history.push(out.max_remainder());
        change_history.push(change);
        log::debug!(
            "fixed point iteration {}: change {change:.3e}, max |R| {:.3e}",
            change_history.len(),
            out.max_remainder()
        );
        let converged = change < tol;
        if converged || change_history.len() >= max_iter {
            return Ok(FixedPointResult {
                output: out,
                remainder_history,
                change_history,
                converged,
            });
        }
        surrogate = out.fields.clone();
    }
}
