//! Vector-calculus product rules evaluated with padded products.

use super::field::{ScalarField, VectorField};
use super::ops::{curl, div, grad};
use super::product::{advect, cross, dot, mul, scalar_mul};
use crate::error::{Error, Result};
use crate::par;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    /// ∇(fg) = f∇g + g∇f
    A1,
    /// ∇(u·v) = u×(∇×v) + v×(∇×u) + (u·∇)v + (v·∇)u
    A2,
    /// ∇·(fv) = f∇·v + v·∇f
    A3,
    /// ∇·(u×v) = v·(∇×u) − u·(∇×v)
    A4,
    /// ∇×(fv) = ∇f×v + f∇×v
    A5,
    /// ∇×(u×v) = u(∇·v) − v(∇·u) + (v·∇)u − (u·∇)v
    A6,
    /// (∇×u)×u = (u·∇)u − ½∇|u|²
    A7,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::A1,
        Identity::A2,
        Identity::A3,
        Identity::A4,
        Identity::A5,
        Identity::A6,
        Identity::A7,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::A1 => "A1",
            Identity::A2 => "A2",
            Identity::A3 => "A3",
            Identity::A4 => "A4",
            Identity::A5 => "A5",
            Identity::A6 => "A6",
            Identity::A7 => "A7",
        }
    }
}

/// Operands for an identity check; each identity uses a subset.
#[derive(Clone, Debug, Default)]
pub struct IdentityInputs {
    pub f: Option<ScalarField>,
    pub g: Option<ScalarField>,
    pub u: Option<VectorField>,
    pub v: Option<VectorField>,
}

fn need<'a, T>(x: &'a Option<T>, id: Identity, what: &str) -> Result<&'a T> {
    x.as_ref()
        .ok_or_else(|| Error::structural(format!("{} needs operand `{what}`", id.name())))
}

fn max_abs_scalar(a: &ScalarField, b: &ScalarField) -> f64 {
    let d = a.sub(b).to_physical();
    par::max(d.len(), |i| d[i].abs())
}

fn max_abs_vector(a: &VectorField, b: &VectorField) -> f64 {
    (0..3)
        .map(|i| max_abs_scalar(a.comp(i), b.comp(i)))
        .fold(0.0, f64::max)
}

/// Max-norm of left minus right on the grid nodes.
pub fn check_identity(id: Identity, inputs: &IdentityInputs) -> Result<f64> {
    match id {
        Identity::A1 => {
            let f = need(&inputs.f, id, "f")?;
            let g = need(&inputs.g, id, "g")?;
            let lhs = grad(&mul(f, g));
            let rhs = scalar_mul(f, &grad(g)).add(&scalar_mul(g, &grad(f)));
            Ok(max_abs_vector(&lhs, &rhs))
        }
        Identity::A2 => {
            let u = need(&inputs.u, id, "u")?;
            let v = need(&inputs.v, id, "v")?;
            let lhs = grad(&dot(u, v));
            let rhs = cross(u, &curl(v))
                .add(&cross(v, &curl(u)))
                .add(&advect(u, v))
                .add(&advect(v, u));
            Ok(max_abs_vector(&lhs, &rhs))
        }
        Identity::A3 => {
            let f = need(&inputs.f, id, "f")?;
            let v = need(&inputs.v, id, "v")?;
            let lhs = div(&scalar_mul(f, v));
            let rhs = mul(f, &div(v)).add(&dot(v, &grad(f)));
            Ok(max_abs_scalar(&lhs, &rhs))
        }
        Identity::A4 => {
            let u = need(&inputs.u, id, "u")?;
            let v = need(&inputs.v, id, "v")?;
            let lhs = div(&cross(u, v));
            let rhs = dot(v, &curl(u)).sub(&dot(u, &curl(v)));
            Ok(max_abs_scalar(&lhs, &rhs))
        }
        Identity::A5 => {
            let f = need(&inputs.f, id, "f")?;
            let v = need(&inputs.v, id, "v")?;
            let lhs = curl(&scalar_mul(f, v));
            let rhs = cross(&grad(f), v).add(&scalar_mul(f, &curl(v)));
            Ok(max_abs_vector(&lhs, &rhs))
        }
        Identity::A6 => {
            let u = need(&inputs.u, id, "u")?;
            let v = need(&inputs.v, id, "v")?;
            let lhs = curl(&cross(u, v));
            let rhs = scalar_mul(&div(v), u)
                .sub(&scalar_mul(&div(u), v))
                .add(&advect(v, u))
                .sub(&advect(u, v));
            Ok(max_abs_vector(&lhs, &rhs))
        }
        Identity::A7 => {
            let u = need(&inputs.u, id, "u")?;
            let lhs = cross(&curl(u), u);
            let rhs = advect(u, u).sub(&grad(&dot(u, u)).scaled(0.5));
            Ok(max_abs_vector(&lhs, &rhs))
        }
    }
}

/// Worst residual of every identity over `sets` random operand sets with
/// modes `|k|∞ ≤ kmax`, each operand scaled to unit maximum on the grid.
pub fn identity_suite(grid: super::Grid, sets: usize, kmax: i64, seed: u64) -> Result<[(Identity, f64); 7]> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut worst = Identity::ALL.map(|id| (id, 0.0f64));
    for _ in 0..sets {
        let scalar = |rng: &mut rand_chacha::ChaCha8Rng| {
            let f = super::random::scalar(grid, kmax, rng);
            let m = f.max_abs_physical();
            f.scaled(1.0 / m)
        };
        let vector = |rng: &mut rand_chacha::ChaCha8Rng| {
            let v = super::random::vector(grid, kmax, rng);
            let m = v.max_magnitude();
            v.scaled(1.0 / m)
        };
        let inputs = IdentityInputs {
            f: Some(scalar(&mut rng)),
            g: Some(scalar(&mut rng)),
            u: Some(vector(&mut rng)),
            v: Some(vector(&mut rng)),
        };
        for (id, w) in worst.iter_mut() {
            *w = w.max(check_identity(*id, &inputs)?);
        }
    }
    Ok(worst)
}
