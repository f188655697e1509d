use std::f64::consts::PI;

use hvmhd::coupled::{
    apply_f, cfl_dt, fixed_point_solve, rhs_induction, rhs_momentum, step, tflat, FieldTrajectory, PhysicalConstants,
    PlasmaState,
};
use hvmhd::density::InitialDensity;
use hvmhd::mollifier::{prepare_initial_f, MollifierSpec};
use hvmhd::spectral::ops::{curl, laplacian};
use hvmhd::spectral::product::cross;
use hvmhd::spectral::{leray_project, random, Grid, VectorField};
use hvmhd::vlasov::ParticleEnsemble;
use hvmhd::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn state(u: VectorField, b: VectorField, particles: ParticleEnsemble, eps: f64) -> PlasmaState {
    PlasmaState::new(u, b, particles, MollifierSpec::new(eps).unwrap(), PhysicalConstants::unity()).unwrap()
}

fn rel_diff(a: &VectorField, b: &VectorField) -> f64 {
    a.sub(b).norm_l2_sq().sqrt() / b.norm_l2_sq().sqrt().max(1e-300)
}

fn dist(a: &PlasmaState, b: &PlasmaState) -> f64 {
    (a.u.sub(&b.u).norm_l2_sq() + a.b.sub(&b.b).norm_l2_sq()).sqrt()
}

fn ball(markers: usize, spec: &MollifierSpec, seed: u64) -> ParticleEnsemble {
    let density = InitialDensity::UniformBall {
        amplitude: 1.0,
        radius: 1.0,
        drift: [0.0; 3],
    };
    prepare_initial_f(&density, spec, markers, seed).unwrap().ensemble
}

/// Smooth divergence-free data with markers from a uniform ball.
fn smooth_state(n: usize, eps: f64, amp: f64, markers: usize) -> PlasmaState {
    let grid = Grid::new(n).unwrap();
    let u = VectorField::from_fn(grid, |x| [amp * x[1].sin(), amp * (x[2] + x[0]).cos() * 0.5, 0.0]);
    let b = VectorField::from_fn(grid, |x| [0.0, amp * 0.3 * x[0].sin(), amp * x[0].cos()]);
    let spec = MollifierSpec::new(eps).unwrap();
    let p = ball(markers, &spec, 7);
    state(leray_project(&u), leray_project(&b), p, eps)
}

fn run(mut s: PlasmaState, dt: f64, steps: usize) -> PlasmaState {
    for _ in 0..steps {
        s = step(&s, dt).unwrap();
    }
    s
}

#[test]
fn quiescent_state_has_zero_tendencies() {
    let grid = Grid::new(8).unwrap();
    let s = state(VectorField::zeros(grid), VectorField::zeros(grid), ParticleEnsemble::empty(), 0.25);
    assert_eq!(rhs_momentum(&s).unwrap().max_abs_coeff(), 0.0);
    assert_eq!(rhs_induction(&s).unwrap().max_abs_coeff(), 0.0);
}

#[test]
fn momentum_tendency_matches_hand_computed_mode_coupling() {
    let grid = Grid::new(16).unwrap();
    let eps = 0.3;
    let spec = MollifierSpec::new(eps).unwrap();
    let (k1, a1) = ([1i64, 0, 0], [0.0, 0.7, -0.4]);
    let (k2, a2) = ([0i64, 1, 1], [0.5, 0.3, -0.3]);
    let (m1, m2) = (spec.multiplier(k1), spec.multiplier(k2));
    let dotk = |k: [i64; 3], x: [f64; 3]| k[0] as f64 * x[0] + k[1] as f64 * x[1] + k[2] as f64 * x[2];
    let u = VectorField::from_fn(grid, |x| {
        let (s, c) = (dotk(k1, x).sin(), dotk(k2, x).cos());
        std::array::from_fn(|i| a1[i] * s + a2[i] * c)
    });
    // -(U^ε·∇)U + ΔU evaluated pointwise from the two modes.
    let minus_adv = VectorField::from_fn(grid, |x| {
        let (s1, c1) = (dotk(k1, x).sin(), dotk(k1, x).cos());
        let (s2, c2) = (dotk(k2, x).sin(), dotk(k2, x).cos());
        let ue: [f64; 3] = std::array::from_fn(|j| m1 * a1[j] * s1 + m2 * a2[j] * c2);
        std::array::from_fn(|i| {
            -(0..3)
                .map(|j| ue[j] * (a1[i] * k1[j] as f64 * c1 - a2[i] * k2[j] as f64 * s2))
                .sum::<f64>()
        })
    });
    let lap = VectorField::from_fn(grid, |x| {
        let (s, c) = (dotk(k1, x).sin(), dotk(k2, x).cos());
        std::array::from_fn(|i| -1.0 * a1[i] * s - 2.0 * a2[i] * c)
    });
    let mut expect = leray_project(&minus_adv);
    expect.axpy(1.0, &lap);
    let s = state(u, VectorField::zeros(grid), ParticleEnsemble::empty(), eps);
    let got = rhs_momentum(&s).unwrap();
    assert!(rel_diff(&got, &expect) < 1e-12, "{}", rel_diff(&got, &expect));
    assert!(got.divergence_residual() < 1e-12);
}

#[test]
fn uniform_field_and_current_give_constant_coupling() {
    let grid = Grid::new(8).unwrap();
    let n = grid.n();
    let dx = grid.dx();
    let mut x = Vec::new();
    for i in 0..n * n * n {
        x.push([(i / (n * n)) as f64 * dx, ((i / n) % n) as f64 * dx, (i % n) as f64 * dx]);
    }
    let count = x.len();
    let particles = ParticleEnsemble::new(x, vec![[0.0, 1.0, 0.0]; count], vec![grid.cell_volume(); count]).unwrap();
    let s = state(VectorField::zeros(grid), VectorField::constant(grid, [0.0, 0.0, 1.0]), particles, 0.25);
    let r = rhs_momentum(&s).unwrap();
    let mean = r.mean();
    assert!((mean[0] + 1.0).abs() < 1e-12 && mean[1].abs() < 1e-12 && mean[2].abs() < 1e-12);
    assert!(r.sub(&VectorField::constant(grid, [-1.0, 0.0, 0.0])).max_abs_coeff() < 1e-12);
}

#[test]
fn dimensional_constants_scale_the_lorentz_and_viscous_terms() {
    let grid = Grid::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let b = random::solenoidal(grid, 2, &mut rng);
    let zero = VectorField::zeros(grid);
    let unity = state(zero.clone(), b.clone(), ParticleEnsemble::empty(), 0.0);
    let mut scaled = unity.clone();
    scaled.constants = PhysicalConstants::new(1.0, 1.0, 1.0, 0.5, 3.0, 2.0).unwrap();
    let r1 = rhs_momentum(&unity).unwrap();
    let r2 = rhs_momentum(&scaled).unwrap();
    assert!(rel_diff(&r2, &r1.scaled(1.0 / 6.0)) < 1e-13);
    let i1 = rhs_induction(&unity).unwrap();
    let i2 = rhs_induction(&scaled).unwrap();
    assert!(rel_diff(&i2, &i1.scaled(0.5 / 3.0)) < 1e-13);
}

#[test]
fn induction_without_flow_is_diffusion() {
    let grid = Grid::new(8).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let b = random::solenoidal(grid, 3, &mut rng);
    let s = state(VectorField::zeros(grid), b.clone(), ParticleEnsemble::empty(), 0.0);
    assert!(rel_diff(&rhs_induction(&s).unwrap(), &laplacian(&b)) < 1e-13);
    let s = state(b, VectorField::zeros(grid), ParticleEnsemble::empty(), 0.0);
    assert_eq!(rhs_induction(&s).unwrap().max_abs_coeff(), 0.0);
}

#[test]
fn induction_matches_curl_of_cross_product() {
    let grid = Grid::new(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let u = random::solenoidal(grid, 3, &mut rng);
        let b = random::solenoidal(grid, 3, &mut rng);
        let mut expect = curl(&cross(&u, &b));
        expect.axpy(1.0, &laplacian(&b));
        let s = state(u, b, ParticleEnsemble::empty(), 0.0);
        let got = rhs_induction(&s).unwrap();
        assert!(rel_diff(&got, &expect) < 1e-10, "{}", rel_diff(&got, &expect));
    }
}

#[test]
fn taylor_green_vortex_decays_at_rate_two() {
    let grid = Grid::new(16).unwrap();
    let tg = |x: [f64; 3]| [x[0].sin() * x[1].cos(), -x[0].cos() * x[1].sin(), 0.0];
    let u0 = VectorField::from_fn(grid, tg);
    let s = state(u0.clone(), VectorField::zeros(grid), ParticleEnsemble::empty(), 0.25);
    let end = run(s, 0.05, 20);
    assert!((end.t - 1.0).abs() < 1e-12);
    let expect = u0.scaled((-2.0f64).exp());
    assert!(rel_diff(&end.u, &expect) < 1e-10, "{}", rel_diff(&end.u, &expect));
    assert!(end.u.divergence_residual() < 1e-11);
}

#[test]
fn zero_step_is_identity() {
    let s = smooth_state(8, 0.5, 0.5, 500);
    let same = step(&s, 0.0).unwrap();
    assert_eq!(same.t, s.t);
    assert_eq!(same.u.max_abs_coeff(), s.u.max_abs_coeff());
    assert_eq!(dist(&same, &s), 0.0);
    assert_eq!(same.particles.positions(), s.particles.positions());
    assert_eq!(same.particles.velocities(), s.particles.velocities());
}

#[test]
fn negative_step_is_rejected() {
    let s = smooth_state(8, 0.5, 0.5, 10);
    assert!(matches!(step(&s, -0.1), Err(Error::Parameter { .. })));
}

#[test]
fn step_keeps_fields_solenoidal_and_mass_fixed() {
    let s = smooth_state(16, 0.5, 0.5, 2000);
    let mass = s.particles.total_weight();
    let end = run(s, 0.05, 4);
    assert!(end.u.divergence_residual() < 1e-11);
    assert!(end.b.divergence_residual() < 1e-11);
    assert_eq!(end.particles.total_weight(), mass);
}

#[test]
fn full_system_self_converges_at_second_order() {
    let s = smooth_state(16, 0.5, 0.5, 2000);
    let t = 0.5;
    let ends: Vec<PlasmaState> = [10, 20, 40].iter().map(|&m| run(s.clone(), t / m as f64, m)).collect();
    let d1 = dist(&ends[0], &ends[1]);
    let d2 = dist(&ends[1], &ends[2]);
    let order = (d1 / d2).log2();
    assert!(order > 1.8, "d1 = {d1:e}, d2 = {d2:e}, order {order}");
}

#[test]
fn cfl_step_respects_diffusive_limit() {
    let s = smooth_state(16, 0.5, 0.5, 100);
    let dx = 2.0 * PI / 16.0;
    let dt = cfl_dt(&s);
    assert!(dt > 0.0 && dt <= 0.5 * dx * dx + 1e-15);
}

#[test]
fn map_with_quiet_surrogate_is_heat_decay() {
    let grid = Grid::new(8).unwrap();
    let u0 = VectorField::from_fn(grid, |x| [(x[1] + x[2]).sin(), 0.0, 0.0]);
    let s = state(u0.clone(), VectorField::zeros(grid), ParticleEnsemble::empty(), 0.5);
    let z = VectorField::zeros(grid);
    let sur = FieldTrajectory::constant(&z, &z, 0.5, 10);
    let out = apply_f(&sur, &s, 0.5, 0.05).unwrap();
    for (k, u) in out.fields.u.iter().enumerate() {
        let expect = u0.scaled((-2.0 * out.fields.times[k]).exp());
        assert!(rel_diff(u, &expect) < 1e-12);
    }
    assert_eq!(out.max_remainder(), 0.0);
}

#[test]
fn map_rejects_mismatched_time_grid() {
    let s = smooth_state(8, 0.5, 0.2, 10);
    let sur = FieldTrajectory::constant(&s.u, &s.b, 0.5, 10);
    assert!(matches!(apply_f(&sur, &s, 0.5, 0.025), Err(Error::Structural(_))));
    let mut bad = sur.clone();
    bad.times[3] += 0.01;
    assert!(matches!(apply_f(&bad, &s, 0.5, 0.05), Err(Error::Structural(_))));
}

#[test]
fn map_reproduces_a_nonlinear_run_used_as_surrogate() {
    let s = smooth_state(16, 0.5, 0.3, 1000);
    let (steps, dt) = (10, 0.025);
    let mut traj = vec![s.clone()];
    for _ in 0..steps {
        let next = step(traj.last().unwrap(), dt).unwrap();
        traj.push(next);
    }
    let sur = FieldTrajectory {
        times: traj.iter().map(|p| p.t).collect(),
        u: traj.iter().map(|p| p.u.clone()).collect(),
        b: traj.iter().map(|p| p.b.clone()).collect(),
    };
    let out = apply_f(&sur, &s, steps as f64 * dt, dt).unwrap();
    let gap = out.fields.max_distance(&sur).unwrap();
    let scale = (s.u.norm_l2_sq() + s.b.norm_l2_sq()).sqrt();
    assert!(gap < 1e-4 * scale, "gap {gap:e}");
}

#[test]
fn shear_flow_fixed_point_converges_in_two_iterations() {
    let grid = Grid::new(8).unwrap();
    let u0 = VectorField::from_fn(grid, |x| [x[1].sin(), 0.0, 0.0]);
    let s = state(u0.clone(), VectorField::zeros(grid), ParticleEnsemble::empty(), 0.5);
    let res = fixed_point_solve(&s, 0.25, 0.025, 1e-12, 10).unwrap();
    assert!(res.converged);
    assert_eq!(res.iterations(), 2);
    let last = res.output.fields.u.last().unwrap();
    assert!(rel_diff(last, &u0.scaled((-0.25f64).exp())) < 1e-12);
}

#[test]
fn fixed_point_remainder_falls_and_matches_direct_run() {
    let s = smooth_state(8, 0.5, 0.2, 2000);
    let e0 = s.total_energy();
    let (t, dt) = (0.25, 0.025);
    let res = fixed_point_solve(&s, t, dt, 1e-10, 40).unwrap();
    assert!(res.converged, "{:?}", res.change_history);
    let r = &res.remainder_history;
    for w in r[1..].windows(2) {
        assert!(w[1] < w[0], "{r:?}");
    }
    assert!(*r.last().unwrap() < 1e-6 * e0, "{r:?}");
    let direct = run(s.clone(), dt, 10);
    let fu = res.output.fields.u.last().unwrap();
    let fb = res.output.fields.b.last().unwrap();
    let gap = (fu.sub(&direct.u).norm_l2_sq() + fb.sub(&direct.b).norm_l2_sq()).sqrt();
    assert!(gap < 10.0 * dt * dt * e0.sqrt() + 1e-10, "gap {gap:e}");
}

#[test]
fn fixed_point_rejects_bad_tolerance() {
    let s = smooth_state(8, 0.5, 0.2, 10);
    assert!(fixed_point_solve(&s, 0.25, 0.025, 0.0, 5).is_err());
}

#[test]
fn tflat_formula_and_scaling() {
    assert!((tflat(1.0, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
    let base = tflat(2.0, 3.0, 5.0).unwrap();
    assert!((tflat(2.0, 3.0, 10.0).unwrap() / base - 2f64.powf(-0.8)).abs() < 1e-14);
    assert!((tflat(2.0, 6.0, 5.0).unwrap() / base - 2f64.powf(-0.2)).abs() < 1e-14);
    assert!(tflat(2.0, 3.0, 5.0).unwrap() > tflat(2.0, 3.5, 5.0).unwrap());
    assert!(matches!(tflat(0.0, 1.0, 1.0), Err(Error::Parameter { .. })));
    assert!(matches!(tflat(1.0, -1.0, 1.0), Err(Error::Parameter { .. })));
}

#[test]
fn constants_must_be_positive() {
    assert!(PhysicalConstants::new(1.0, 1.0, 0.0, 1.0, 1.0, 1.0).is_err());
    assert!(PhysicalConstants::new(1.0, f64::NAN, 1.0, 1.0, 1.0, 1.0).is_err());
    assert_eq!(PhysicalConstants::default(), PhysicalConstants::unity());
}

#[test]
fn compressible_initial_data_is_rejected() {
    let grid = Grid::new(8).unwrap();
    let u = VectorField::from_fn(grid, |x| [x[0].sin(), 0.0, 0.0]);
    let r = PlasmaState::new(
        u,
        VectorField::zeros(grid),
        ParticleEnsemble::empty(),
        MollifierSpec::identity(),
        PhysicalConstants::unity(),
    );
    assert!(matches!(r, Err(Error::Input(_))));
}
