use std::f64::consts::PI;

use hvmhd::coupled::{step, PhysicalConstants, PlasmaState};
use hvmhd::density::InitialDensity;
use hvmhd::diagnostics::{
    conserved_quantities, conversion_rates, conversion_rates_with, diagnostics_row, energy_exchange_audit,
    ensemble_bound_report, moment_bound_constant, moment_bound_report, total_energy, weak_residual, AuditFrame,
    EnergyTracker, ScalarTest, SpaceFactor, TestSuite, VectorTest, VelocityFactor, WeakEquation,
};
use hvmhd::mollifier::{prepare_initial_f, MollifierSpec};
use hvmhd::spectral::{leray_project, Grid, ScalarField, VectorField};
use hvmhd::vlasov::{deposit_moments, push_particles, Moments, ParticleEnsemble};
use hvmhd::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn state(u: VectorField, b: VectorField, particles: ParticleEnsemble, eps: f64) -> PlasmaState {
    PlasmaState::new(u, b, particles, MollifierSpec::new(eps).unwrap(), PhysicalConstants::unity()).unwrap()
}

/// One marker on every grid node carrying `v` and weight `dV`, so the
/// deposited current is exactly `v`.
fn lattice(grid: Grid, v: [f64; 3]) -> ParticleEnsemble {
    let n = grid.n();
    let dx = grid.dx();
    let x: Vec<[f64; 3]> = (0..n * n * n)
        .map(|i| [(i / (n * n)) as f64 * dx, ((i / n) % n) as f64 * dx, (i % n) as f64 * dx])
        .collect();
    let m = x.len();
    ParticleEnsemble::new(x, vec![v; m], vec![grid.cell_volume(); m]).unwrap()
}

fn ball(markers: usize, eps: f64, seed: u64) -> ParticleEnsemble {
    let spec = MollifierSpec::new(eps).unwrap();
    prepare_initial_f(&InitialDensity::uniform_ball(1.0, 1.0), &spec, markers, seed).unwrap().ensemble
}

/// A divergence-free trigonometric polynomial: `Σ a sin(k·x + φ)`, `k·a = 0`.
#[derive(Clone)]
struct Modes(Vec<([i64; 3], [f64; 3], f64)>);

impl Modes {
    fn random(rng: &mut ChaCha8Rng, count: usize, kmax: i64) -> Self {
        let mut out = Vec::new();
        while out.len() < count {
            let k: [i64; 3] = std::array::from_fn(|_| rng.gen_range(-kmax..=kmax));
            if k == [0, 0, 0] {
                continue;
            }
            let r: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
            let kk: f64 = k.iter().map(|c| (c * c) as f64).sum();
            let kr: f64 = (0..3).map(|i| k[i] as f64 * r[i]).sum();
            let a: [f64; 3] = std::array::from_fn(|i| r[i] - kr / kk * k[i] as f64);
            out.push((k, a, rng.gen_range(0.0..2.0 * PI)));
        }
        Modes(out)
    }

    /// Value and Jacobian `∂_j F_i`, each mode scaled by `m(k)`.
    fn eval(&self, x: [f64; 3], m: impl Fn([i64; 3]) -> f64) -> ([f64; 3], [[f64; 3]; 3]) {
        let mut f = [0.0; 3];
        let mut j = [[0.0; 3]; 3];
        for (k, a, phi) in &self.0 {
            let p = k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2] + phi;
            let s = m(*k);
            for i in 0..3 {
                f[i] += s * a[i] * p.sin();
                for d in 0..3 {
                    j[i][d] += s * a[i] * k[d] as f64 * p.cos();
                }
            }
        }
        (f, j)
    }

    fn field(&self, grid: Grid) -> VectorField {
        let me = self.clone();
        VectorField::from_fn(grid, move |x| me.eval(x, |_| 1.0).0)
    }
}

/// Sum over the nodes of an `n`-point grid per axis, times the cell volume.
fn quadrature(n: usize, f: impl Fn([f64; 3]) -> f64) -> f64 {
    let h = 2.0 * PI / n as f64;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                s += f([i as f64 * h, j as f64 * h, k as f64 * h]);
            }
        }
    }
    s * h * h * h
}

#[test]
fn zero_state_reports_zero() {
    let grid = Grid::new(8).unwrap();
    let s = state(VectorField::zeros(grid), VectorField::zeros(grid), ParticleEnsemble::empty(), 0.25);
    let r = total_energy(&s);
    assert_eq!([r.e_fluid, r.e_mag, r.e_particles, r.e_total, r.r1, r.r2, r.dissipation_rate], [0.0; 7]);
    assert_eq!(conserved_quantities(&s), ([0.0; 3], 0.0));
}

#[test]
fn shear_flow_energy_is_two_pi_cubed() {
    let grid = Grid::new(8).unwrap();
    let u = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    let s = state(u, VectorField::zeros(grid), ParticleEnsemble::empty(), 0.0);
    let r = total_energy(&s);
    assert!((r.e_fluid - 2.0 * PI.powi(3)).abs() < 1e-12);
    assert_eq!(r.e_total, r.e_fluid + r.e_mag + r.e_particles);
    // |∇U|² = cos² x₂ integrates to 4π³.
    assert!((r.dissipation_rate - 4.0 * PI.powi(3)).abs() < 1e-11);
}

#[test]
fn total_energy_matches_raw_recomputation() {
    let grid = Grid::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = Modes::random(&mut rng, 4, 2).field(grid);
    let b = Modes::random(&mut rng, 4, 2).field(grid);
    let s = state(u.clone(), b.clone(), ball(300, 0.25, 1), 0.25);
    let r = total_energy(&s);
    let nodes = |f: &VectorField| f.to_physical().iter().flatten().map(|x| x * x).sum::<f64>() * grid.cell_volume();
    let ep: f64 = s.particles.velocities().iter().zip(s.particles.weights()).map(|(v, w)| 0.5 * w * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])).sum();
    let raw = 0.5 * nodes(&u) + 0.5 * nodes(&b) + ep;
    assert!((r.e_total - raw).abs() < 1e-13 * raw.max(1.0) * 10.0, "{} {}", r.e_total, raw);
}

#[test]
fn uniform_fields_give_minus_eight_pi_cubed() {
    let grid = Grid::new(8).unwrap();
    let s = state(
        VectorField::constant(grid, [1.0, 0.0, 0.0]),
        VectorField::constant(grid, [0.0, 0.0, 1.0]),
        lattice(grid, [0.0, 1.0, 0.0]),
        0.25,
    );
    let (r1, r2) = conversion_rates(&s);
    assert!((r1 + 8.0 * PI.powi(3)).abs() < 1e-10, "{r1}");
    assert!((r1 + 248.05).abs() < 0.01);
    assert_eq!(r2, 0.0);
}

#[test]
fn rates_vanish_without_magnetic_field() {
    let grid = Grid::new(8).unwrap();
    let u = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, x[0].cos()]);
    let s = state(u, VectorField::zeros(grid), ball(200, 0.5, 2), 0.5);
    assert_eq!(conversion_rates(&s), (0.0, 0.0));
}

#[test]
fn rates_match_oversampled_quadrature() {
    let grid = Grid::new(8).unwrap();
    let eps = 0.4;
    let spec = MollifierSpec::new(eps).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..3 {
        let (mu, mb, mk) = (
            Modes::random(&mut rng, 3, 2),
            Modes::random(&mut rng, 3, 2),
            Modes::random(&mut rng, 3, 2),
        );
        let s = state(mu.field(grid), mb.field(grid), ParticleEnsemble::empty(), eps);
        let moments = Moments {
            n: ScalarField::zeros(grid),
            k: mk.field(grid),
            sigma2: ScalarField::zeros(grid),
        };
        let (r1, r2) = conversion_rates_with(&s, &moments);
        let m = |k| spec.multiplier(k);
        let r1_oracle = quadrature(32, |x| {
            let ue = mu.eval(x, m).0;
            let be = mb.eval(x, m).0;
            let k = mk.eval(x, |_| 1.0).0;
            let c = [be[1] * k[2] - be[2] * k[1], be[2] * k[0] - be[0] * k[2], be[0] * k[1] - be[1] * k[0]];
            ue[0] * c[0] + ue[1] * c[1] + ue[2] * c[2]
        });
        let r2_oracle = quadrature(32, |x| {
            let (_, du) = mu.eval(x, |_| 1.0);
            let b = mb.eval(x, |_| 1.0).0;
            let be = mb.eval(x, m).0;
            (0..3).map(|i| b[i] * (0..3).map(|j| be[j] * du[i][j]).sum::<f64>()).sum()
        });
        assert!((r1 - r1_oracle).abs() < 1e-10 * r1_oracle.abs().max(1.0), "{r1} {r1_oracle}");
        assert!((r2 - r2_oracle).abs() < 1e-10 * r2_oracle.abs().max(1.0), "{r2} {r2_oracle}");
    }
}

#[test]
fn momentum_and_mass_of_simple_states() {
    let grid = Grid::new(8).unwrap();
    let u = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    let s = state(u, VectorField::zeros(grid), ParticleEnsemble::empty(), 0.0);
    let (p, m) = conserved_quantities(&s);
    assert!(p.iter().all(|c| c.abs() < 1e-12));
    assert_eq!(m, 0.0);

    let one = ParticleEnsemble::new(vec![[1.0, 2.0, 3.0]], vec![[1.0, 0.0, 0.0]], vec![1.0]).unwrap();
    let s = state(VectorField::zeros(grid), VectorField::constant(grid, [0.0, 1.0, 0.0]), one, 0.0);
    let mut s = s;
    s.u = VectorField::constant(grid, [0.0, 1.0, 0.0]);
    let (p, m) = conserved_quantities(&s);
    let vol = (2.0 * PI).powi(3);
    assert!((p[0] - 1.0).abs() < 1e-12 && (p[1] - vol).abs() < 1e-10 && p[2].abs() < 1e-12);
    assert_eq!(m, 1.0);
}

#[test]
fn tracker_integrates_dissipation_of_heat_flow() {
    let grid = Grid::new(8).unwrap();
    let u = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    let mut s = state(u, VectorField::zeros(grid), ParticleEnsemble::empty(), 0.0);
    let mut tracker = EnergyTracker::new(&s);
    for _ in 0..40 {
        s = step(&s, 0.025).unwrap();
        tracker.update(&s);
    }
    // E(t) = 2π³e^{−2t}, so ∫D = 2π³(1 − e^{−2}).
    let exact = 2.0 * PI.powi(3) * (1.0 - (-2.0f64).exp());
    assert!((tracker.cumulative_dissipation - exact).abs() < 1e-3 * exact);
    let row = diagnostics_row(&s, &tracker);
    assert!(row.energy.balance_residual.abs() < 1e-3 * tracker.e_total0);
    assert!(row.div_u < 1e-12);
}

#[test]
fn bound_constants_follow_the_closed_form() {
    assert_eq!(moment_bound_constant(2.0).unwrap(), 1.0);
    let c0 = 5.0 / 3.0 * (2.0 * PI).powf(0.4);
    assert!((moment_bound_constant(0.0).unwrap() - c0).abs() < 1e-14);
    let c1 = 1.25 * (4.0 * PI).powf(0.2);
    assert!((moment_bound_constant(1.0).unwrap() - c1).abs() < 1e-14);
    assert!(matches!(moment_bound_constant(2.5), Err(Error::Parameter { .. })));
    assert!(matches!(moment_bound_constant(-0.1), Err(Error::Parameter { .. })));
}

#[test]
fn bound_exponents_and_norm_index() {
    let grid = Grid::new(4).unwrap();
    let nodes = vec![1.0; grid.physical_len()];
    let vol = (2.0 * PI).powi(3);
    for (k, p, a, b) in [(0.0, 5.0 / 3.0, 0.4, 0.6), (1.0, 1.25, 0.2, 0.8)] {
        let base = moment_bound_report(&nodes, grid, 1.0, 1.0, k).unwrap();
        assert!((base.lhs_norm - vol.powf(1.0 / p)).abs() < 1e-12 * base.lhs_norm);
        let f2 = moment_bound_report(&nodes, grid, 2.0, 1.0, k).unwrap();
        assert!((f2.rhs_bound / base.rhs_bound - 2f64.powf(a)).abs() < 1e-13);
        let e2 = moment_bound_report(&nodes, grid, 1.0, 2.0, k).unwrap();
        assert!((e2.rhs_bound / base.rhs_bound - 2f64.powf(b)).abs() < 1e-13);
    }
    assert!(moment_bound_report(&nodes, grid, 0.0, 1.0, 1.0).is_err());
    assert!(moment_bound_report(&nodes[1..], grid, 1.0, 1.0, 1.0).is_err());
}

#[test]
fn uniform_ball_matches_analytic_evaluation() {
    let grid = Grid::new(4).unwrap();
    let (amp, radius) = (1.0f64, 1.0f64);
    let vol = (2.0 * PI).powi(3);
    let e = 0.5 * vol * 4.0 * PI * amp * radius.powi(5) / 5.0;
    for k in [0.0, 0.5, 1.0, 1.5, 2.0] {
        let mk = 4.0 * PI * amp * radius.powf(3.0 + k) / (3.0 + k);
        let nodes = vec![mk; grid.physical_len()];
        let r = moment_bound_report(&nodes, grid, amp, e, k).unwrap();
        let p = 5.0 / (3.0 + k);
        assert!((r.lhs_norm - mk * vol.powf(1.0 / p)).abs() < 1e-12 * r.lhs_norm);
        let a = (2.0 - k) / 5.0;
        let ratio = a.powf(a);
        assert!((r.ratio - ratio).abs() < 1e-12, "k = {k}: {} vs {ratio}", r.ratio);
        assert!(r.holds);
    }
}

#[test]
fn bound_holds_on_random_ensembles() {
    let grid = Grid::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..100 {
        let drift: [f64; 3] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let density = if trial % 2 == 0 {
            InitialDensity::UniformBall {
                amplitude: rng.gen_range(0.1..3.0),
                radius: rng.gen_range(0.3..2.0),
                drift,
            }
        } else {
            InitialDensity::Maxwellian {
                density: rng.gen_range(0.1..3.0),
                thermal_speed: rng.gen_range(0.3..2.0),
                drift,
            }
        };
        let eps = if trial % 3 == 0 { 0.0 } else { 0.3 };
        let spec = MollifierSpec::new(eps).unwrap();
        let ens = prepare_initial_f(&density, &spec, 20_000, trial).unwrap().ensemble;
        for k in [0.0, 0.5, 1.0, 1.5, 2.0] {
            let r = ensemble_bound_report(&ens, grid, density.sup(), k).unwrap();
            assert!(r.holds, "trial {trial}, k = {k}: ratio {}", r.ratio);
        }
    }
}

#[test]
fn audit_needs_three_frames() {
    let f = AuditFrame::default();
    assert!(matches!(energy_exchange_audit(&[f, f]), Err(Error::Structural(_))));
}

#[test]
fn audit_of_zero_history_is_zero() {
    let frames: Vec<AuditFrame> = (0..5)
        .map(|i| AuditFrame {
            t: i as f64 * 0.1,
            ..Default::default()
        })
        .collect();
    let r = energy_exchange_audit(&frames).unwrap();
    assert_eq!((r.particles, r.fluid, r.magnetic), (0.0, 0.0, 0.0));
}

fn frozen_field_audit(dt: f64, steps: usize) -> f64 {
    let grid = Grid::new(8).unwrap();
    let u = leray_project(&VectorField::from_fn(grid, |x| [0.5 * x[1].sin(), 0.0, 0.3 * x[0].cos()]));
    let b = leray_project(&VectorField::from_fn(grid, |x| [0.0, 0.4 * x[2].cos(), 1.0]));
    let mut s = state(u, b, ball(200_000, 0.0, 3), 0.0);
    let mut frames = vec![AuditFrame::from_state(&s)];
    for _ in 0..steps {
        let (uu, bb) = (s.u.clone(), s.b.clone());
        push_particles(&mut s.particles, &uu, &bb, dt).unwrap();
        s.t += dt;
        frames.push(AuditFrame::from_state(&s));
    }
    energy_exchange_audit(&frames).unwrap().particles
}

#[test]
fn frozen_field_particle_audit_is_second_order() {
    let coarse = frozen_field_audit(0.02, 10);
    let fine = frozen_field_audit(0.01, 20);
    let order = (coarse / fine).log2();
    assert!(order > 1.85, "{coarse:e} {fine:e}");
}

fn mhd_audit(dt: f64, steps: usize) -> (f64, f64) {
    let grid = Grid::new(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let u = Modes::random(&mut rng, 4, 2).field(grid);
    let b = Modes::random(&mut rng, 4, 2).field(grid);
    let mut s = state(u, b, ParticleEnsemble::empty(), 0.3);
    let mut frames = vec![AuditFrame::from_state(&s)];
    for _ in 0..steps {
        s = step(&s, dt).unwrap();
        frames.push(AuditFrame::from_state(&s));
    }
    let r = energy_exchange_audit(&frames).unwrap();
    assert_eq!(r.particles, 0.0);
    (r.fluid, r.magnetic)
}

#[test]
fn pure_mhd_channels_balance_through_the_stretching_rate() {
    let (f1, m1) = mhd_audit(0.01, 10);
    let (f2, m2) = mhd_audit(0.005, 20);
    assert!((f1 / f2).log2() > 1.8, "{f1:e} {f2:e}");
    assert!((m1 / m2).log2() > 1.8, "{m1:e} {m2:e}");
}

fn run_history(n: usize, markers: usize, dt: f64, steps: usize) -> Vec<PlasmaState> {
    let grid = Grid::new(n).unwrap();
    let u = leray_project(&VectorField::from_fn(grid, |x| [0.3 * x[1].sin(), 0.0, 0.2 * x[0].cos()]));
    let b = leray_project(&VectorField::from_fn(grid, |x| [0.0, 0.2 * x[2].sin(), 0.5 * x[0].cos()]));
    let mut s = state(u, b, ball(markers, 0.5, 4), 0.5);
    let mut out = vec![s.clone()];
    for _ in 0..steps {
        s = step(&s, dt).unwrap();
        out.push(s.clone());
    }
    out
}

#[test]
fn weak_reductions_reproduce_mass_and_momentum() {
    let history = run_history(8, 400, 0.05, 6);
    let e = |i: usize| {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        VectorTest {
            time: vec![1.0],
            k: [0, 0, 0],
            amplitude: a,
            sine: false,
        }
    };
    let suite = TestSuite {
        scalar: vec![
            ScalarTest {
                time: vec![1.0, 2.0],
                space: SpaceFactor::One,
                velocity: VelocityFactor::One,
            },
            ScalarTest {
                time: vec![1.0],
                space: SpaceFactor::One,
                velocity: VelocityFactor::Component(0),
            },
            ScalarTest {
                time: vec![1.0],
                space: SpaceFactor::One,
                velocity: VelocityFactor::Component(1),
            },
            ScalarTest {
                time: vec![1.0],
                space: SpaceFactor::One,
                velocity: VelocityFactor::Component(2),
            },
        ],
        vector: vec![e(0), e(1), e(2)],
    };
    let rows = weak_residual(&history, &suite).unwrap();
    let mass = &rows[0];
    assert_eq!(mass.equation, WeakEquation::Kinetic);
    assert!(mass.residual < 1e-12 * history[0].particles.total_weight());

    let (p0, _) = conserved_quantities(&history[0]);
    let (p1, _) = conserved_quantities(history.last().unwrap());
    let mom: Vec<_> = rows.iter().filter(|r| r.equation == WeakEquation::Momentum).collect();
    for i in 0..3 {
        let kinetic = &rows[1 + i];
        let change = mom[i].lhs + kinetic.lhs;
        assert!((change - (p1[i] - p0[i])).abs() < 1e-12 * p0.iter().map(|c| c.abs()).fold(1.0, f64::max));
    }
}

#[test]
fn weak_residual_rejects_compressible_vector_tests() {
    let history = run_history(8, 50, 0.05, 2);
    let suite = TestSuite {
        scalar: vec![],
        vector: vec![VectorTest {
            time: vec![1.0],
            k: [1, 0, 0],
            amplitude: [1.0, 0.0, 0.0],
            sine: true,
        }],
    };
    assert!(matches!(weak_residual(&history, &suite), Err(Error::Structural(_))));
    assert!(matches!(weak_residual(&history[..1], &TestSuite::default()), Err(Error::Structural(_))));
}

#[test]
fn weak_residual_shrinks_with_refinement() {
    let suite = TestSuite {
        scalar: vec![ScalarTest {
            time: vec![1.0, -1.0],
            space: SpaceFactor::Cos([1, 0, 0]),
            velocity: VelocityFactor::Bump {
                center: [0.0; 3],
                radius: 1.5,
            },
        }],
        vector: vec![VectorTest {
            time: vec![1.0, 0.5],
            k: [0, 1, 0],
            amplitude: [1.0, 0.0, 0.5],
            sine: true,
        }],
    };
    let coarse = weak_residual(&run_history(8, 2000, 0.1, 5), &suite).unwrap();
    let fine = weak_residual(&run_history(16, 16000, 0.05, 10), &suite).unwrap();
    for (c, f) in coarse.iter().zip(&fine) {
        assert!(f.residual < c.residual, "{:?}: {} -> {}", c.equation, c.residual, f.residual);
    }
}

#[test]
fn deposited_moments_drive_the_rates() {
    let grid = Grid::new(8).unwrap();
    let u = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    let b = VectorField::constant(grid, [0.0, 0.0, 1.0]);
    let s = state(u, b, ball(500, 0.5, 5), 0.5);
    let direct = conversion_rates_with(&s, &deposit_moments(&s.particles, grid));
    assert_eq!(conversion_rates(&s), direct);
}

