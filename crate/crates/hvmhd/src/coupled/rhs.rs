use super::{PhysicalConstants, PlasmaState};
use crate::error::{Error, Result};
use crate::mollifier::MollifierSpec;
use crate::spectral::product::{pad_gradient, pointwise, Padded, PaddedVec};
use crate::spectral::{leray_project, ops, Dealias, VectorField};
use crate::vlasov::{deposit_moments, Moments};

/// Padded moments `n`, `K`, fixed during a field update.
pub(crate) struct Sources {
    n: Padded,
    k: PaddedVec,
}

impl Sources {
    pub(crate) fn new(d: &Dealias, m: &Moments) -> Self {
        Sources {
            n: d.pad(&m.n),
            k: d.pad_vector(&m.k),
        }
    }

    pub(crate) fn from_ensemble(d: &Dealias, ens: &crate::vlasov::ParticleEnsemble) -> Option<Self> {
        (!ens.is_empty()).then(|| Self::new(d, &deposit_moments(ens, d.grid())))
    }
}

pub(crate) struct Transport<'a> {
    pub dealias: Dealias,
    pub mollifier: &'a MollifierSpec,
    pub constants: PhysicalConstants,
}

impl<'a> Transport<'a> {
    pub(crate) fn for_state(state: &'a PlasmaState) -> Self {
        Transport {
            dealias: Dealias::new(state.grid()),
            mollifier: &state.mollifier,
            constants: state.constants,
        }
    }

    /// Projected tendencies of `(u, b)` without diffusion. `adv` is the
    /// (already mollified) advecting velocity and `mag` the mollified
    /// magnetic field that stretches and couples.
    pub(crate) fn tendencies(
        &self,
        u: &VectorField,
        b: &VectorField,
        adv: &VectorField,
        mag: &VectorField,
        src: Option<&Sources>,
    ) -> (VectorField, VectorField) {
        let d = &self.dealias;
        let c = &self.constants;
        let pa = d.pad_vector(adv);
        let pm = d.pad_vector(mag);
        let du = pad_gradient(d, u);
        let db = pad_gradient(d, b);

        let mut mu = pointwise::advect(&pm, &db);
        for comp in mu.iter_mut() {
            comp.iter_mut().for_each(|x| *x *= c.lorentz());
        }
        pointwise::add_scaled(&mut mu, -1.0, &pointwise::advect(&pa, &du));
        if let Some(s) = src {
            let uxb = pointwise::cross(&d.pad_vector(u), &pm);
            pointwise::add_scaled(&mut mu, c.coupling(), &pointwise::scale(&s.n, &uxb));
        }
        let mut fu = d.truncate_vector(&mu);
        if let Some(s) = src {
            let bxk = self.mollifier.mollify(&d.truncate_vector(&pointwise::cross(&pm, &s.k)));
            fu.axpy(c.coupling(), &bxk);
        }

        let mut mb = pointwise::advect(&pm, &du);
        pointwise::add_scaled(&mut mb, -1.0, &pointwise::advect(&pa, &db));
        let fb = d.truncate_vector(&mb);

        (leray_project(&fu), leray_project(&fb))
    }

    /// Tendencies with `adv = u^ε`, `mag = b^ε`.
    pub(crate) fn self_tendencies(
        &self,
        u: &VectorField,
        b: &VectorField,
        src: Option<&Sources>,
    ) -> (VectorField, VectorField) {
        let ue = self.mollifier.mollify(u);
        let be = self.mollifier.mollify(b);
        self.tendencies(u, b, &ue, &be, src)
    }
}

fn full_rhs(state: &PlasmaState, with_sources: bool) -> Result<(VectorField, VectorField)> {
    let tr = Transport::for_state(state);
    let src = if with_sources {
        Sources::from_ensemble(&tr.dealias, &state.particles)
    } else {
        None
    };
    let (mut fu, mut fb) = tr.self_tendencies(&state.u, &state.b, src.as_ref());
    fu.axpy(state.constants.viscosity(), &ops::laplacian(&state.u));
    fb.axpy(state.constants.magnetic_diffusivity(), &ops::laplacian(&state.b));
    if !fu.is_finite() || !fb.is_finite() {
        return Err(Error::NonFinite {
            t: state.t,
            what: "field tendency".into(),
        });
    }
    Ok((fu, fb))
}

/// `∂t U` including the kinetic coupling (moments deposited from the
/// state's markers) and viscosity.
pub fn rhs_momentum(state: &PlasmaState) -> Result<VectorField> {
    full_rhs(state, true).map(|(fu, _)| fu)
}

/// `∂t B` including resistive diffusion.
pub fn rhs_induction(state: &PlasmaState) -> Result<VectorField> {
    full_rhs(state, false).map(|(_, fb)| fb)
}
