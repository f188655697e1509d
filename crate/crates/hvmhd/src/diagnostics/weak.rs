//! Residuals of the weak formulation evaluated on a stored history.
//!
//! For each test function the identity
//! `⟨·, test⟩(t) − ⟨·, test⟩(0) − ∫₀ᵗ⟨·, ∂t test⟩ = ∫₀ᵗ (flux terms)` is
//! checked at every stored time, with marker sums standing in for phase-space
//! integrals and trapezoidal time quadrature. The transport coefficients are
//! the mollified fields of the history, so for `ε = 0` these are the weak
//! forms of the unmollified system.

use crate::coupled::PlasmaState;
use crate::error::{Error, Result};
use crate::spectral::product::pad_gradient;
use crate::spectral::{ops, Dealias, Grid, VectorField};
use crate::vlasov::{cross, FieldSampler};
use crate::par;

/// Spatial factor of a scalar test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpaceFactor {
    One,
    Cos([i64; 3]),
    Sin([i64; 3]),
}

impl SpaceFactor {
    fn value_grad(&self, x: [f64; 3]) -> (f64, [f64; 3]) {
        match *self {
            SpaceFactor::One => (1.0, [0.0; 3]),
            SpaceFactor::Cos(k) => {
                let (s, c) = phase(k, x).sin_cos();
                (c, kf(k).map(|ki| -ki * s))
            }
            SpaceFactor::Sin(k) => {
                let (s, c) = phase(k, x).sin_cos();
                (s, kf(k).map(|ki| ki * c))
            }
        }
    }
}

/// Velocity factor of a scalar test function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VelocityFactor {
    One,
    /// `v_i`.
    Component(usize),
    /// `(1 − |v − c|²/R²)²₊`.
    Bump { center: [f64; 3], radius: f64 },
}

impl VelocityFactor {
    fn value_grad(&self, v: [f64; 3]) -> (f64, [f64; 3]) {
        match *self {
            VelocityFactor::One => (1.0, [0.0; 3]),
            VelocityFactor::Component(i) => {
                let mut g = [0.0; 3];
                g[i] = 1.0;
                (v[i], g)
            }
            VelocityFactor::Bump { center, radius } => {
                let d = [v[0] - center[0], v[1] - center[1], v[2] - center[2]];
                let q = 1.0 - (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (radius * radius);
                if q <= 0.0 {
                    (0.0, [0.0; 3])
                } else {
                    (q * q, d.map(|di| -4.0 * q * di / (radius * radius)))
                }
            }
        }
    }
}

/// `g(t, x, v) = τ(t) φ(x) ψ(v)` with `τ` a polynomial (coefficients in
/// increasing degree).
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarTest {
    pub time: Vec<f64>,
    pub space: SpaceFactor,
    pub velocity: VelocityFactor,
}

/// `V(t, x) = τ(t) a φ(k·x)` with `φ = cos` or `sin` and `k·a = 0`;
/// `k = 0` with `cos` gives a constant field.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorTest {
    pub time: Vec<f64>,
    pub k: [i64; 3],
    pub amplitude: [f64; 3],
    pub sine: bool,
}

impl VectorTest {
    fn check(&self) -> Result<()> {
        let kdota: f64 = (0..3).map(|i| self.k[i] as f64 * self.amplitude[i]).sum();
        let scale = self.amplitude.iter().map(|a| a.abs()).fold(0.0, f64::max) * kf(self.k).iter().map(|k| k.abs()).fold(0.0, f64::max);
        if kdota.abs() > 1e-14 * scale.max(1.0) {
            return Err(Error::structural(format!(
                "vector test function with k = {:?}, a = {:?} is not divergence-free",
                self.k, self.amplitude
            )));
        }
        Ok(())
    }

    fn profile(&self, x: [f64; 3]) -> f64 {
        let p = phase(self.k, x);
        if self.sine {
            p.sin()
        } else {
            p.cos()
        }
    }

    /// Spatial part `a φ(k·x)` as a grid field.
    fn field(&self, grid: Grid) -> VectorField {
        let a = self.amplitude;
        let s = self.clone();
        VectorField::from_fn(grid, move |x| {
            let f = s.profile(x);
            [a[0] * f, a[1] * f, a[2] * f]
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TestSuite {
    pub scalar: Vec<ScalarTest>,
    pub vector: Vec<VectorTest>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeakEquation {
    Kinetic,
    Momentum,
    Induction,
}

/// One test function applied to one equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeakResidualRow {
    pub equation: WeakEquation,
    /// Index into the suite's scalar or vector list.
    pub index: usize,
    /// `⟨·, test⟩(t) − ⟨·, test⟩(0)` at the last stored time.
    pub lhs: f64,
    /// `∫₀ᵗ (⟨·, ∂t test⟩ + flux)` at the last stored time.
    pub rhs: f64,
    /// `max_t |lhs − rhs|` over stored times.
    pub residual: f64,
}

fn kf(k: [i64; 3]) -> [f64; 3] {
    k.map(|c| c as f64)
}

fn phase(k: [i64; 3], x: [f64; 3]) -> f64 {
    k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2]
}

fn poly(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, a| acc * t + a)
}

fn poly_dt(c: &[f64], t: f64) -> f64 {
    c.iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (j, a)| acc * t + j as f64 * a)
}

/// Accumulates `lhs(t) − rhs(t)` along the history.
struct Ledger {
    pairing0: f64,
    integral: f64,
    last: Option<(f64, f64)>,
    lhs: f64,
    rhs: f64,
    residual: f64,
}

impl Ledger {
    fn new() -> Self {
        Ledger {
            pairing0: 0.0,
            integral: 0.0,
            last: None,
            lhs: 0.0,
            rhs: 0.0,
            residual: 0.0,
        }
    }

    /// `pairing = ⟨·, test⟩(t)`, `dt_pairing = ⟨·, ∂t test⟩`, `flux` the right-side integrand.
    fn push(&mut self, t: f64, pairing: f64, dt_pairing: f64, flux: f64) {
        let integrand = flux + dt_pairing;
        match self.last {
            None => self.pairing0 = pairing,
            Some((t0, i0)) => self.integral += 0.5 * (t - t0) * (integrand + i0),
        }
        self.last = Some((t, integrand));
        self.lhs = pairing - self.pairing0;
        self.rhs = self.integral;
        self.residual = self.residual.max((self.lhs - self.rhs).abs());
    }
}

/// Node sum on the padded grid of `Σ_ij x_i y_j ∂_j V_i`.
fn stress_pairing(d: &Dealias, x: &VectorField, y: &VectorField, dv: &[[Vec<f64>; 3]; 3]) -> f64 {
    let px = d.pad_vector(x);
    let py = d.pad_vector(y);
    let len = d.padded_len();
    let vol = Grid::volume() / len as f64;
    vol * par::sum(len, |p| {
        let mut s = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                s += px[i][p] * py[j][p] * dv[i][j][p];
            }
        }
        s
    })
}

fn grad_pairing(u: &VectorField, v: &VectorField) -> f64 {
    (0..3).map(|c| ops::grad(u.comp(c)).inner(&ops::grad(v.comp(c)))).sum()
}

/// Residual table for every test function against every applicable equation:
/// scalar tests against the kinetic equation, vector tests against the
/// momentum and induction equations.
pub fn weak_residual(history: &[PlasmaState], suite: &TestSuite) -> Result<Vec<WeakResidualRow>> {
    if history.len() < 2 {
        return Err(Error::structural("weak residual needs at least two stored states"));
    }
    for v in &suite.vector {
        v.check()?;
    }
    let grid = history[0].grid();
    for s in history {
        grid.check_same(&s.grid())?;
    }
    let d = Dealias::new(grid);
    let spatial: Vec<(VectorField, [[Vec<f64>; 3]; 3])> = suite
        .vector
        .iter()
        .map(|v| {
            let f = v.field(grid);
            let dv = pad_gradient(&d, &f);
            (f, dv)
        })
        .collect();

    let mut kinetic: Vec<Ledger> = suite.scalar.iter().map(|_| Ledger::new()).collect();
    let mut momentum: Vec<Ledger> = suite.vector.iter().map(|_| Ledger::new()).collect();
    let mut induction: Vec<Ledger> = suite.vector.iter().map(|_| Ledger::new()).collect();

    for state in history {
        let t = state.t;
        let c = state.constants;
        let a_h = c.charge_to_mass();
        let (ue, be) = state.mollified_fields();
        let ens = &state.particles;
        let us = FieldSampler::new(&state.u);
        let ues = FieldSampler::new(&ue);
        let bes = FieldSampler::new(&be);
        let xs = ens.positions();
        let vs = ens.velocities();
        let ws = ens.weights();

        for (g, ledger) in suite.scalar.iter().zip(kinetic.iter_mut()) {
            let tau = poly(&g.time, t);
            let dtau = poly_dt(&g.time, t);
            let [pairing, dt_pairing, flux] = par::sum3(ens.len(), |p| {
                let (x, v, w) = (xs[p], vs[p], ws[p]);
                let (phi, gphi) = g.space.value_grad(x);
                let (psi, gpsi) = g.velocity.value_grad(v);
                let uu = ues.sample(x);
                let bb = bes.sample(x);
                let rel = [v[0] - uu[0], v[1] - uu[1], v[2] - uu[2]];
                let acc = cross(rel, bb);
                let mut f = 0.0;
                for i in 0..3 {
                    f += v[i] * gphi[i] * psi + a_h * acc[i] * phi * gpsi[i];
                }
                [w * tau * phi * psi, w * dtau * phi * psi, w * tau * f]
            });
            ledger.push(t, pairing, dt_pairing, flux);
        }

        for (j, vt) in suite.vector.iter().enumerate() {
            let tau = poly(&vt.time, t);
            let dtau = poly_dt(&vt.time, t);
            let (vf, dv) = &spatial[j];
            let mult = state.mollifier.multiplier(vt.k);

            let pu = state.u.inner(vf);
            let stress_u = stress_pairing(&d, &state.u, &ue, dv) - c.lorentz() * stress_pairing(&d, &state.b, &be, dv);
            let coupling = if ens.is_empty() {
                0.0
            } else {
                par::sum(ens.len(), |p| {
                    let (x, v, w) = (xs[p], vs[p], ws[p]);
                    let prof = vt.profile(x);
                    let vv = vt.amplitude.map(|a| a * prof);
                    let bb = bes.sample(x);
                    let uxb = cross(us.sample(x), bb);
                    let bxv = cross(bb, v);
                    let mut s = 0.0;
                    for i in 0..3 {
                        s += uxb[i] * vv[i] + mult * bxv[i] * vv[i];
                    }
                    w * s
                })
            };
            let flux_u = stress_u - c.viscosity() * grad_pairing(&state.u, vf) + c.coupling() * coupling;
            momentum[j].push(t, tau * pu, dtau * pu, tau * flux_u);

            let pb = state.b.inner(vf);
            let stress_b = stress_pairing(&d, &state.b, &ue, dv) - stress_pairing(&d, &state.u, &be, dv);
            let flux_b = stress_b - c.magnetic_diffusivity() * grad_pairing(&state.b, vf);
            induction[j].push(t, tau * pb, dtau * pb, tau * flux_b);
        }
    }

    let rows = |eq: WeakEquation, ledgers: Vec<Ledger>| {
        ledgers.into_iter().enumerate().map(move |(index, l)| WeakResidualRow {
            equation: eq,
            index,
            lhs: l.lhs,
            rhs: l.rhs,
            residual: l.residual,
        })
    };
    Ok(rows(WeakEquation::Kinetic, kinetic)
        .chain(rows(WeakEquation::Momentum, momentum))
        .chain(rows(WeakEquation::Induction, induction))
        .collect())
}
