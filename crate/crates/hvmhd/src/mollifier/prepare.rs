use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bump, MollifierSpec};
use crate::density::InitialDensity;
use crate::error::Result;
use crate::vlasov::ParticleEnsemble;

/// Result of sampling mollified initial data.
#[derive(Clone, Debug)]
pub struct PreparedEnsemble {
    pub ensemble: ParticleEnsemble,
    /// Set when the cut-off density has no mass and the ensemble is empty.
    pub flagged_empty: bool,
    /// `∫∫ f̊ χ_{|v| ≤ 1/ε}`, shared equally among the markers.
    pub mass: f64,
}

/// A draw from `θ₀` (support radius 1/2) by rejection from the ball.
fn bump_sample<R: Rng>(rng: &mut R) -> [f64; 3] {
    let peak = bump::theta0(0.0);
    loop {
        let y: [f64; 3] = [
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
            rng.gen_range(-0.5..0.5),
        ];
        let r = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
        if r < bump::SUPPORT && rng.gen::<f64>() * peak < bump::theta0(r) {
            return y;
        }
    }
}

/// Sample `(f̊·χ_{|v|≤1/ε}) ∗ (θ^ε_x θ^ε_v)` with `markers` equally weighted markers.
///
/// Markers are drawn from the cut-off density and each is then displaced by
/// independent `θ^ε` draws in position and velocity.
pub fn prepare_initial_f(
    density: &InitialDensity,
    spec: &MollifierSpec,
    markers: usize,
    seed: u64,
) -> Result<PreparedEnsemble> {
    density.validate()?;
    let cutoff = spec.velocity_cutoff();
    let mass = density.mass_within(cutoff);
    if markers == 0 || mass <= 0.0 {
        return Ok(PreparedEnsemble {
            ensemble: ParticleEnsemble::empty(),
            flagged_empty: true,
            mass: mass.max(0.0),
        });
    }
    let eps = spec.epsilon();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Vec::with_capacity(markers);
    let mut v = Vec::with_capacity(markers);
    for _ in 0..markers {
        let mut xi = density.sample_position(&mut rng);
        let mut vi = density.sample_velocity(&mut rng, cutoff)?;
        if eps > 0.0 {
            let dx = bump_sample(&mut rng);
            let dv = bump_sample(&mut rng);
            for d in 0..3 {
                xi[d] += eps * dx[d];
                vi[d] += eps * dv[d];
            }
        }
        x.push(xi);
        v.push(vi);
    }
    let w = vec![mass / markers as f64; markers];
    Ok(PreparedEnsemble {
        ensemble: ParticleEnsemble::new(x, v, w)?,
        flagged_empty: false,
        mass,
    })
}
