//! Analytic initial phase-space densities `f̊(x, v)`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::spectral::Grid;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialDensity {
    /// `f = amplitude` on `|v − drift| ≤ radius`, uniform in x.
    UniformBall {
        amplitude: f64,
        radius: f64,
        drift: [f64; 3],
    },
    /// Drifting Maxwellian with number density `density` per unit volume.
    Maxwellian {
        density: f64,
        thermal_speed: f64,
        drift: [f64; 3],
    },
    /// `f = amplitude·(1 + modulation·cos(k·x))` on `|v| ≤ radius`.
    ModulatedBall {
        amplitude: f64,
        radius: f64,
        modulation: f64,
        wavevector: [i64; 3],
    },
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn ball_volume(r: f64) -> f64 {
    4.0 * PI * r.powi(3) / 3.0
}

/// Volume of the intersection of balls of radii `a`, `b` with centres `d` apart.
fn lens_volume(a: f64, b: f64, d: f64) -> f64 {
    if d >= a + b {
        0.0
    } else if d + a <= b {
        ball_volume(a)
    } else if d + b <= a {
        ball_volume(b)
    } else {
        PI * (a + b - d).powi(2) * (d * d + 2.0 * d * b - 3.0 * b * b + 2.0 * d * a + 6.0 * a * b - 3.0 * a * a)
            / (12.0 * d)
    }
}

fn unit_ball_point<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if p[0] * p[0] + p[1] * p[1] + p[2] * p[2] <= 1.0 {
            return p;
        }
    }
}

impl InitialDensity {
    pub fn uniform_ball(amplitude: f64, radius: f64) -> Self {
        InitialDensity::UniformBall {
            amplitude,
            radius,
            drift: [0.0; 3],
        }
    }

    /// Reject parameter sets that make `f̊` negative or ill-defined.
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Input(format!("initial density: {what}")));
        match *self {
            InitialDensity::UniformBall { amplitude, radius, drift } => {
                if !(amplitude >= 0.0) {
                    return bad("amplitude must be nonnegative");
                }
                if !(radius >= 0.0 && radius.is_finite()) {
                    return bad("radius must be finite and nonnegative");
                }
                if drift.iter().any(|d| !d.is_finite()) {
                    return bad("drift must be finite");
                }
            }
            InitialDensity::Maxwellian { density, thermal_speed, drift } => {
                if !(density >= 0.0) {
                    return bad("density must be nonnegative");
                }
                if !(thermal_speed > 0.0 && thermal_speed.is_finite()) {
                    return bad("thermal speed must be positive");
                }
                if drift.iter().any(|d| !d.is_finite()) {
                    return bad("drift must be finite");
                }
            }
            InitialDensity::ModulatedBall { amplitude, radius, modulation, .. } => {
                if !(amplitude >= 0.0) {
                    return bad("amplitude must be nonnegative");
                }
                if !(radius >= 0.0 && radius.is_finite()) {
                    return bad("radius must be finite and nonnegative");
                }
                if !(modulation.abs() <= 1.0) {
                    return bad("|modulation| > 1 makes the density negative");
                }
            }
        }
        Ok(())
    }

    pub fn value(&self, x: [f64; 3], v: [f64; 3]) -> f64 {
        match *self {
            InitialDensity::UniformBall { amplitude, radius, drift } => {
                let w = [v[0] - drift[0], v[1] - drift[1], v[2] - drift[2]];
                if norm3(w) <= radius {
                    amplitude
                } else {
                    0.0
                }
            }
            InitialDensity::Maxwellian { density, thermal_speed, drift } => {
                let w = [v[0] - drift[0], v[1] - drift[1], v[2] - drift[2]];
                let s2 = thermal_speed * thermal_speed;
                density * (2.0 * PI * s2).powf(-1.5) * (-(w[0] * w[0] + w[1] * w[1] + w[2] * w[2]) / (2.0 * s2)).exp()
            }
            InitialDensity::ModulatedBall { amplitude, radius, modulation, wavevector: k } => {
                if norm3(v) <= radius {
                    let phase = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                    amplitude * (1.0 + modulation * phase.cos())
                } else {
                    0.0
                }
            }
        }
    }

    /// `‖f̊‖_∞`.
    pub fn sup(&self) -> f64 {
        match *self {
            InitialDensity::UniformBall { amplitude, radius, .. } => {
                if radius > 0.0 {
                    amplitude
                } else {
                    0.0
                }
            }
            InitialDensity::Maxwellian { density, thermal_speed, .. } => {
                density * (2.0 * PI * thermal_speed * thermal_speed).powf(-1.5)
            }
            InitialDensity::ModulatedBall { amplitude, modulation, wavevector, .. } => {
                if wavevector == [0, 0, 0] {
                    amplitude * (1.0 + modulation).max(0.0)
                } else {
                    amplitude * (1.0 + modulation.abs())
                }
            }
        }
    }

    /// Mean of the spatial factor over the torus.
    fn spatial_mean(&self) -> f64 {
        match *self {
            InitialDensity::ModulatedBall { modulation, wavevector, .. } if wavevector == [0, 0, 0] => {
                1.0 + modulation
            }
            _ => 1.0,
        }
    }

    /// `∫∫ f̊ χ_{|v| ≤ cutoff} dv dx` (pass `f64::INFINITY` for no cutoff).
    pub fn mass_within(&self, cutoff: f64) -> f64 {
        let vol = Grid::volume() * self.spatial_mean();
        match *self {
            InitialDensity::UniformBall { amplitude, radius, drift } => {
                let v = if cutoff.is_infinite() {
                    ball_volume(radius)
                } else {
                    lens_volume(radius, cutoff, norm3(drift))
                };
                vol * amplitude * v
            }
            InitialDensity::ModulatedBall { amplitude, radius, .. } => {
                vol * amplitude * ball_volume(radius.min(cutoff))
            }
            InitialDensity::Maxwellian { density, thermal_speed, drift } => {
                if cutoff.is_infinite() {
                    return vol * density;
                }
                let s2 = thermal_speed * thermal_speed;
                let d = norm3(drift);
                let norm = (2.0 * PI * s2).powf(-1.5);
                let shell = |r: f64| -> f64 {
                    if d < 1e-12 * thermal_speed || r == 0.0 {
                        4.0 * PI * r * r * (-(r * r + d * d) / (2.0 * s2)).exp()
                    } else {
                        let a = (-(r - d).powi(2) / (2.0 * s2)).exp();
                        let b = (-(r + d).powi(2) / (2.0 * s2)).exp();
                        2.0 * PI * r * s2 / d * (a - b)
                    }
                };
                vol * density * norm * integrate(shell, 0.0, cutoff, 1e-15)
            }
        }
    }

    pub fn mass(&self) -> f64 {
        self.mass_within(f64::INFINITY)
    }

    /// `E[f̊] = ½∫∫|v|² f̊` without cutoff.
    pub fn energy(&self) -> f64 {
        let vol = Grid::volume() * self.spatial_mean();
        match *self {
            InitialDensity::UniformBall { amplitude, radius, drift } => {
                let d2 = drift.iter().map(|d| d * d).sum::<f64>();
                0.5 * vol * amplitude * (4.0 * PI * radius.powi(5) / 5.0 + d2 * ball_volume(radius))
            }
            InitialDensity::ModulatedBall { amplitude, radius, .. } => {
                0.5 * vol * amplitude * 4.0 * PI * radius.powi(5) / 5.0
            }
            InitialDensity::Maxwellian { density, thermal_speed, drift } => {
                let d2 = drift.iter().map(|d| d * d).sum::<f64>();
                0.5 * vol * density * (3.0 * thermal_speed * thermal_speed + d2)
            }
        }
    }

    /// Largest speed in the support (infinite for the Maxwellian).
    pub fn speed_bound(&self) -> f64 {
        match *self {
            InitialDensity::UniformBall { radius, drift, .. } => radius + norm3(drift),
            InitialDensity::ModulatedBall { radius, .. } => radius,
            InitialDensity::Maxwellian { .. } => f64::INFINITY,
        }
    }

    pub fn sample_position<R: Rng>(&self, rng: &mut R) -> [f64; 3] {
        let two_pi = 2.0 * PI;
        loop {
            let x = [rng.gen_range(0.0..two_pi), rng.gen_range(0.0..two_pi), rng.gen_range(0.0..two_pi)];
            match *self {
                InitialDensity::ModulatedBall { modulation, wavevector: k, .. } if k != [0, 0, 0] => {
                    let phase = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
                    let accept = (1.0 + modulation * phase.cos()) / (1.0 + modulation.abs());
                    if rng.gen::<f64>() < accept {
                        return x;
                    }
                }
                _ => return x,
            }
        }
    }

    /// Velocity drawn from the velocity profile restricted to `|v| ≤ cutoff`.
    pub fn sample_velocity<R: Rng>(&self, rng: &mut R, cutoff: f64) -> Result<[f64; 3]> {
        const MAX_TRIES: usize = 1_000_000;
        for _ in 0..MAX_TRIES {
            let v = match *self {
                InitialDensity::UniformBall { radius, drift, .. } => {
                    let p = unit_ball_point(rng);
                    [drift[0] + radius * p[0], drift[1] + radius * p[1], drift[2] + radius * p[2]]
                }
                InitialDensity::ModulatedBall { radius, .. } => {
                    let p = unit_ball_point(rng);
                    [radius * p[0], radius * p[1], radius * p[2]]
                }
                InitialDensity::Maxwellian { thermal_speed, drift, .. } => {
                    let z: [f64; 3] = [
                        StandardNormal.sample(rng),
                        StandardNormal.sample(rng),
                        StandardNormal.sample(rng),
                    ];
                    [
                        drift[0] + thermal_speed * z[0],
                        drift[1] + thermal_speed * z[1],
                        drift[2] + thermal_speed * z[2],
                    ]
                }
            };
            if norm3(v) <= cutoff {
                return Ok(v);
            }
        }
        Err(Error::Input("velocity cutoff leaves almost no mass to sample".into()))
    }
}
