use super::rhs::{Sources, Transport};
use super::PlasmaState;
use crate::error::{Error, Result};
use crate::spectral::{leray_project, VectorField};
use crate::vlasov::{push_in_samplers, FieldSampler, ParticleEnsemble};

/// Coefficient size treated as blow-up.
const BLOWUP: f64 = 1e12;

/// `v` multiplied by `exp(−ν|k|²t)`.
pub(crate) fn decayed(v: &VectorField, nu: f64, t: f64) -> VectorField {
    let mut out = v.clone();
    out.apply_scalar_multiplier(|k| (-nu * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]) as f64 * t).exp());
    out
}

/// Integrating-factor RK3 for `∂t(u, b) = ν Δ(u, b) + N(s, u, b)`, where
/// `s ∈ {0, ½, 1}` is the stage position within the step.
pub(crate) fn if_rk3<N>(
    u0: &VectorField,
    b0: &VectorField,
    dt: f64,
    nu: (f64, f64),
    mut nonlinear: N,
) -> (VectorField, VectorField)
where
    N: FnMut(f64, &VectorField, &VectorField) -> (VectorField, VectorField),
{
    let half = |v: &VectorField, nu: f64| decayed(v, nu, 0.5 * dt);
    let full = |v: &VectorField, nu: f64| decayed(v, nu, dt);

    let (n0u, n0b) = nonlinear(0.0, u0, b0);
    let stage_a = |x: &VectorField, n: &VectorField, nu: f64| {
        let mut y = x.clone();
        y.axpy(0.5 * dt, n);
        half(&y, nu)
    };
    let (au, ab) = (stage_a(u0, &n0u, nu.0), stage_a(b0, &n0b, nu.1));
    let (nau, nab) = nonlinear(0.5, &au, &ab);

    let stage_b = |x: &VectorField, n0: &VectorField, na: &VectorField, nu: f64| {
        let mut y = x.clone();
        y.axpy(-dt, n0);
        let mut y = full(&y, nu);
        y.axpy(2.0 * dt, &half(na, nu));
        y
    };
    let (bu, bb) = (stage_b(u0, &n0u, &nau, nu.0), stage_b(b0, &n0b, &nab, nu.1));
    let (nbu, nbb) = nonlinear(1.0, &bu, &bb);

    let last = |x: &VectorField, n0: &VectorField, na: &VectorField, nb: &VectorField, nu: f64| {
        let mut y = x.clone();
        y.axpy(dt / 6.0, n0);
        let mut y = full(&y, nu);
        y.axpy(4.0 * dt / 6.0, &half(na, nu));
        y.axpy(dt / 6.0, nb);
        y
    };
    (
        last(u0, &n0u, &nau, &nbu, nu.0),
        last(b0, &n0b, &nab, &nbb, nu.1),
    )
}

pub(crate) fn half_push(
    particles: &mut ParticleEnsemble,
    u_eps: &VectorField,
    b_eps: &VectorField,
    dt: f64,
    charge_to_mass: f64,
) -> Result<()> {
    if particles.is_empty() {
        return Ok(());
    }
    push_in_samplers(
        particles,
        &FieldSampler::new(u_eps),
        &FieldSampler::new(b_eps),
        0.5 * dt,
        charge_to_mass,
    )
}

pub(crate) fn check_fields(t: f64, u: &VectorField, b: &VectorField) -> Result<()> {
    if !u.is_finite() || !b.is_finite() {
        return Err(Error::NonFinite {
            t,
            what: "velocity or magnetic field".into(),
        });
    }
    let size = u.max_abs_coeff().max(b.max_abs_coeff());
    if size > BLOWUP {
        return Err(Error::Instability(format!(
            "field coefficient {size:.3e} at t = {t}"
        )));
    }
    Ok(())
}

/// Advance by `dt`: half push in `(U^ε, B^ε)(t)`, deposit, field update by
/// integrating-factor RK3 with the deposited moments, projection, half push
/// in the updated fields. `dt = 0` returns the state unchanged.
pub fn step(state: &PlasmaState, dt: f64) -> Result<PlasmaState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", "must be positive and finite"));
    }
    let grid = state.grid();
    let courant = state.u.max_magnitude() * dt / grid.dx();
    if courant > 0.5 {
        log::warn!("advective Courant number {courant:.3} exceeds 0.5 at t = {}", state.t);
    }
    let c = state.constants;
    let tr = Transport::for_state(state);
    let (ue, be) = state.mollified_fields();
    let mut particles = state.particles.clone();
    half_push(&mut particles, &ue, &be, dt, c.charge_to_mass())?;
    let src = Sources::from_ensemble(&tr.dealias, &particles);

    let (u1, b1) = if_rk3(
        &state.u,
        &state.b,
        dt,
        (c.viscosity(), c.magnetic_diffusivity()),
        |_, u, b| tr.self_tendencies(u, b, src.as_ref()),
    );
    let (u1, b1) = (leray_project(&u1), leray_project(&b1));
    let t1 = state.t + dt;
    check_fields(t1, &u1, &b1)?;

    let (ue1, be1) = (state.mollifier.mollify(&u1), state.mollifier.mollify(&b1));
    half_push(&mut particles, &ue1, &be1, dt, c.charge_to_mass())?;
    if !particles.is_finite() {
        return Err(Error::NonFinite {
            t: t1,
            what: "marker coordinates".into(),
        });
    }
    Ok(PlasmaState {
        t: t1,
        u: u1,
        b: b1,
        particles,
        mollifier: state.mollifier.clone(),
        constants: c,
    })
}

/// `0.5 · min(Δx/max|U|, Δx/max|B|, Δx/max|v|, 1/(a_h max|B|), Δx²/ν)`,
/// ignoring terms whose denominators vanish; infinite for a quiescent state
/// without diffusion.
pub fn cfl_dt(state: &PlasmaState) -> f64 {
    let dx = state.grid().dx();
    let c = state.constants;
    let umax = state.u.max_magnitude();
    let bmax = state.b.max_magnitude();
    let vmax = state.particles.max_speed();
    let nu = c.viscosity().max(c.magnetic_diffusivity());
    let limits = [
        dx / umax,
        dx / bmax,
        dx / vmax,
        1.0 / (c.charge_to_mass() * bmax),
        dx * dx / nu,
    ];
    0.5 * limits
        .iter()
        .copied()
        .filter(|x| x.is_finite() && *x > 0.0)
        .fold(f64::INFINITY, f64::min)
}
