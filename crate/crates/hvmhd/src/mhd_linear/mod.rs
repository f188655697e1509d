//! Forced linear incompressible MHD solved on a divergence-free
//! Fourier-Galerkin basis:
//!
//! ```text
//! ∂t u = P_N[−(a·∇)u + (b·∇)B + Δu + u×g + h]
//! ∂t B = P_N[−(a·∇)B + (b·∇)u + ΔB + h₁]
//! ```

mod basis;

pub use basis::{galerkin_basis, BasisMode, GalerkinBasis, Profile};

use crate::error::{Error, Result};
use crate::spectral::product::{pad_gradient, pointwise, Dealias};
use crate::spectral::{Grid, VectorField, DIV_FREE_TOL};

/// Growth of the coefficient norm treated as an instability.
const BLOWUP: f64 = 1e10;

/// Time-independent coefficients, forcings and initial data.
#[derive(Clone, Debug)]
pub struct LinearMHDProblem {
    pub a: VectorField,
    pub b: VectorField,
    pub g: VectorField,
    pub h: VectorField,
    pub h1: VectorField,
    pub init_u: VectorField,
    pub init_b: VectorField,
    pub horizon: f64,
}

impl LinearMHDProblem {
    /// Checks grids, divergence of `a`, `b` and of the initial data, and the horizon.
    pub fn new(
        [a, b, g, h, h1]: [VectorField; 5],
        init_u: VectorField,
        init_b: VectorField,
        horizon: f64,
    ) -> Result<Self> {
        let grid = a.grid();
        for f in [&b, &g, &h, &h1, &init_u, &init_b] {
            grid.check_same(&f.grid())?;
        }
        for (name, f) in [("a", &a), ("b", &b), ("init_u", &init_u), ("init_B", &init_b)] {
            let r = f.divergence_residual();
            if r > DIV_FREE_TOL {
                return Err(Error::Input(format!("{name} is not divergence-free (residual {r:e})")));
            }
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param("horizon", "must be positive and finite"));
        }
        Ok(LinearMHDProblem {
            a,
            b,
            g,
            h,
            h1,
            init_u,
            init_b,
            horizon,
        })
    }

    /// All coefficients and forcings zero, with the given initial data.
    pub fn unforced(init_u: VectorField, init_b: VectorField, horizon: f64) -> Result<Self> {
        let z = VectorField::zeros(init_u.grid());
        Self::new([z.clone(), z.clone(), z.clone(), z.clone(), z], init_u, init_b, horizon)
    }

    pub fn grid(&self) -> Grid {
        self.a.grid()
    }
}

/// Coefficient time series on a uniform time grid.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub basis: GalerkinBasis,
    pub times: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn u_field(&self, step: usize) -> VectorField {
        self.basis.synthesize(&self.u[step])
    }

    pub fn b_field(&self, step: usize) -> VectorField {
        self.basis.synthesize(&self.b[step])
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }
}

/// Projected right-hand side without the Laplacian.
struct Operator {
    basis: GalerkinBasis,
    dealias: Dealias,
    a: [Vec<f64>; 3],
    b: [Vec<f64>; 3],
    g: [Vec<f64>; 3],
    h: Vec<f64>,
    h1: Vec<f64>,
    lambda: Vec<f64>,
}

impl Operator {
    fn new(p: &LinearMHDProblem, basis: GalerkinBasis) -> Self {
        let dealias = Dealias::new(p.grid());
        Operator {
            a: dealias.pad_vector(&p.a),
            b: dealias.pad_vector(&p.b),
            g: dealias.pad_vector(&p.g),
            h: basis.project(&p.h),
            h1: basis.project(&p.h1),
            lambda: basis.eigenvalues(),
            basis,
            dealias,
        }
    }

    fn apply(&self, cu: &[f64], cb: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = &self.dealias;
        let u = self.basis.synthesize(cu);
        let bf = self.basis.synthesize(cb);
        let du = pad_gradient(d, &u);
        let db = pad_gradient(d, &bf);
        let mut nu = pointwise::advect(&self.b, &db);
        pointwise::add_scaled(&mut nu, -1.0, &pointwise::advect(&self.a, &du));
        pointwise::add_scaled(&mut nu, 1.0, &pointwise::cross(&d.pad_vector(&u), &self.g));
        let mut nb = pointwise::advect(&self.b, &du);
        pointwise::add_scaled(&mut nb, -1.0, &pointwise::advect(&self.a, &db));
        let mut ru = self.basis.project(&d.truncate_vector(&nu));
        let mut rb = self.basis.project(&d.truncate_vector(&nb));
        for j in 0..ru.len() {
            ru[j] += self.h[j];
            rb[j] += self.h1[j];
        }
        (ru, rb)
    }

    /// Full time derivative including the Laplacian.
    fn derivative(&self, cu: &[f64], cb: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (mut ru, mut rb) = self.apply(cu, cb);
        for j in 0..ru.len() {
            ru[j] += self.lambda[j] * cu[j];
            rb[j] += self.lambda[j] * cb[j];
        }
        (ru, rb)
    }
}

fn decay(lambda: &[f64], t: f64) -> Vec<f64> {
    lambda.iter().map(|l| (l * t).exp()).collect()
}

/// Integrate the Galerkin system with `n_modes` basis fields over the
/// problem horizon, using integrating-factor RK3 with step at most `dt`.
pub fn integrate_linear_mhd(problem: &LinearMHDProblem, n_modes: usize, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", "must be positive and finite"));
    }
    let basis = galerkin_basis(problem.grid(), n_modes)?;
    let op = Operator::new(problem, basis.clone());
    let steps = (problem.horizon / dt).ceil().max(1.0) as usize;
    let dt = problem.horizon / steps as f64;
    let e_half = decay(&op.lambda, 0.5 * dt);
    let e_full = decay(&op.lambda, dt);
    let mut u = basis.project(&problem.init_u);
    let mut b = basis.project(&problem.init_b);
    let norm0 = norm(&u, &b).max(1.0);
    let mut traj = Trajectory {
        basis,
        times: vec![0.0],
        u: vec![u.clone()],
        b: vec![b.clone()],
    };
    let nm = u.len();
    for s in 1..=steps {
        let (n0u, n0b) = op.apply(&u, &b);
        let stage = |x: &[f64], n: &[f64]| -> Vec<f64> {
            (0..nm).map(|j| e_half[j] * (x[j] + 0.5 * dt * n[j])).collect()
        };
        let (au, ab) = (stage(&u, &n0u), stage(&b, &n0b));
        let (nau, nab) = op.apply(&au, &ab);
        let second = |x: &[f64], n0: &[f64], na: &[f64]| -> Vec<f64> {
            (0..nm)
                .map(|j| e_full[j] * x[j] - dt * e_full[j] * n0[j] + 2.0 * dt * e_half[j] * na[j])
                .collect()
        };
        let (bu, bb) = (second(&u, &n0u, &nau), second(&b, &n0b, &nab));
        let (nbu, nbb) = op.apply(&bu, &bb);
        let last = |x: &[f64], n0: &[f64], na: &[f64], nb: &[f64]| -> Vec<f64> {
            (0..nm)
                .map(|j| {
                    e_full[j] * x[j] + dt / 6.0 * (e_full[j] * n0[j] + 4.0 * e_half[j] * na[j] + nb[j])
                })
                .collect()
        };
        u = last(&u, &n0u, &nau, &nbu);
        b = last(&b, &n0b, &nab, &nbb);
        let nrm = norm(&u, &b);
        if !nrm.is_finite() || nrm > BLOWUP * norm0 {
            return Err(Error::Instability(format!(
                "Galerkin coefficients grew to {nrm:e} at step {s}; reduce dt"
            )));
        }
        traj.times.push(s as f64 * dt);
        traj.u.push(u.clone());
        traj.b.push(b.clone());
    }
    Ok(traj)
}

fn norm(u: &[f64], b: &[f64]) -> f64 {
    u.iter().chain(b).map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// `∫₀^T` of equally spaced samples: composite Simpson, with a 3/8 panel at
/// the end when the interval count is odd.
pub fn time_integral(samples: &[f64], dt: f64) -> f64 {
    let n = samples.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * dt * (samples[0] + samples[1]),
        2 => dt / 3.0 * (samples[0] + 4.0 * samples[1] + samples[2]),
        _ => {
            let simpson_end = if n % 2 == 0 { n } else { n - 3 };
            let mut s = 0.0;
            for i in (0..simpson_end).step_by(2) {
                s += dt / 3.0 * (samples[i] + 4.0 * samples[i + 1] + samples[i + 2]);
            }
            if simpson_end < n {
                let y = &samples[simpson_end..];
                s += 3.0 * dt / 8.0 * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3]);
            }
            s
        }
    }
}

/// `|LHS − RHS|` of
/// `‖(u,B)‖²|₀^T + 2∫‖(∇u,∇B)‖² = 2∫⟨u,h⟩ + ⟨B,h₁⟩`.
pub fn verify_energy_identity(traj: &Trajectory, problem: &LinearMHDProblem) -> f64 {
    let basis = &traj.basis;
    let k2: Vec<f64> = basis.modes().iter().map(|m| m.k_squared()).collect();
    let hp = basis.project(&problem.h);
    let h1p = basis.project(&problem.h1);
    let last = traj.times.len() - 1;
    let energy = |s: usize| dot(&traj.u[s], &traj.u[s]) + dot(&traj.b[s], &traj.b[s]);
    let grad: Vec<f64> = (0..=last)
        .map(|s| {
            (0..k2.len())
                .map(|j| k2[j] * (traj.u[s][j].powi(2) + traj.b[s][j].powi(2)))
                .sum()
        })
        .collect();
    let work: Vec<f64> = (0..=last).map(|s| dot(&traj.u[s], &hp) + dot(&traj.b[s], &h1p)).collect();
    if last == 0 {
        return 0.0;
    }
    let dt = traj.dt();
    let lhs = energy(last) - energy(0) + 2.0 * time_integral(&grad, dt);
    let rhs = 2.0 * time_integral(&work, dt);
    (lhs - rhs).abs()
}

/// Both sides of the a-priori bound on `∇(u,B)` and `∂t(u,B)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyPtReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluate
/// `‖(∇u,∇B)‖²|₀^T + ∫‖∂t(u,B)‖² ≤ 2 sup{|a|²,|b|²,|g|²,1} ∫‖(∇u,∇B,u,h,h₁)‖²`
/// on a trajectory, with time derivatives rebuilt from the right-hand side.
pub fn verify_energy_pt_bound(traj: &Trajectory, problem: &LinearMHDProblem) -> EnergyPtReport {
    let op = Operator::new(problem, traj.basis.clone());
    let k2: Vec<f64> = traj.basis.modes().iter().map(|m| m.k_squared()).collect();
    let grad = |s: usize| -> f64 {
        (0..k2.len())
            .map(|j| k2[j] * (traj.u[s][j].powi(2) + traj.b[s][j].powi(2)))
            .sum()
    };
    let last = traj.times.len() - 1;
    let rate: Vec<f64> = (0..=last)
        .map(|s| {
            let (du, db) = op.derivative(&traj.u[s], &traj.b[s]);
            dot(&du, &du) + dot(&db, &db)
        })
        .collect();
    let forcing = problem.h.norm_l2_sq() + problem.h1.norm_l2_sq();
    let bulk: Vec<f64> = (0..=last)
        .map(|s| grad(s) + dot(&traj.u[s], &traj.u[s]) + forcing)
        .collect();
    let sup = [&problem.a, &problem.b, &problem.g]
        .iter()
        .map(|f| f.max_magnitude().powi(2))
        .fold(1.0, f64::max);
    let dt = if last > 0 { traj.dt() } else { 0.0 };
    let lhs = grad(last) - grad(0) + time_integral(&rate, dt);
    let rhs = 2.0 * sup * time_integral(&bulk, dt);
    EnergyPtReport {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12 * rhs.abs().max(1.0),
    }
}
