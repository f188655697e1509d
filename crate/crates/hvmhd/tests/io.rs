use std::path::Path;

use hvmhd::coupled::{run_simulation, run_simulation_with, PhysicalConstants, PlasmaState, RunOptions};
use hvmhd::density::InitialDensity;
use hvmhd::io::checkpoint::{decode, encode};
use hvmhd::io::{
    read_checkpoint, read_diagnostics_csv, write_checkpoint, Checkpoint, CheckpointError, RunConfig, TimeStep,
    CSV_COLUMNS,
};
use hvmhd::mollifier::MollifierSpec;
use hvmhd::spectral::{random, Grid, VectorField};
use hvmhd::vlasov::ParticleEnsemble;
use hvmhd::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MINIMAL: &str = "\
[grid]
n = 8
[time]
t_end = 0.5
[mollifier]
epsilon = 0.5
";

fn small_run(out: &Path) -> String {
    format!(
        "\
[grid]
n = 8
[time]
t_end = 0.2
dt = 0.025
[mollifier]
epsilon = 0.5
[particles]
markers = 500
density = uniform_ball
amplitude = 1.0
radius = 1.0
[velocity]
mode = sin 0 1 0 0.5 0 0
[magnetic]
mode = cos 1 0 0 0 0 0.5
[diagnostics]
cadence = 2
checkpoint_every = 3
[run]
output = {}
seed = 9
",
        out.display()
    )
}

fn sample_state() -> PlasmaState {
    let grid = Grid::with_dealias(8, 0.9).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random::solenoidal(grid, 2, &mut rng);
    let b = random::solenoidal(grid, 2, &mut rng);
    let p = ParticleEnsemble::new(
        vec![[0.1, 0.2, 0.3], [6.0, 1.0, 2.5]],
        vec![[1.0, -2.0, 0.5], [0.0, 0.1, -0.2]],
        vec![0.25, 1.5],
    )
    .unwrap();
    let c = PhysicalConstants::new(2.0, 3.0, 0.1, 0.2, 1.5, 0.7).unwrap();
    let mut s = PlasmaState::new(u, b, p, MollifierSpec::new(0.3).unwrap(), c).unwrap();
    s.t = 1.25;
    s
}

fn checkpoint(state: PlasmaState) -> Checkpoint {
    Checkpoint {
        state,
        step: 17,
        dt: 0.0625,
        cumulative_dissipation: 3.5,
        e_total0: 12.0,
        momentum0: [1.0, -2.0, 0.5],
        mass0: 1.75,
    }
}

fn same_state(a: &PlasmaState, b: &PlasmaState) -> bool {
    let coeffs = |s: &PlasmaState| -> Vec<(u64, u64)> {
        s.u.comps()
            .iter()
            .chain(s.b.comps())
            .flat_map(|c| c.coeffs().iter().map(|z| (z.re.to_bits(), z.im.to_bits())))
            .collect()
    };
    a.t.to_bits() == b.t.to_bits()
        && coeffs(a) == coeffs(b)
        && a.particles.positions() == b.particles.positions()
        && a.particles.velocities() == b.particles.velocities()
        && a.particles.weights() == b.particles.weights()
        && a.mollifier == b.mollifier
        && a.constants == b.constants
        && a.grid() == b.grid()
}

#[test]
fn minimal_config_gets_defaults() {
    let c = RunConfig::parse(MINIMAL, false).unwrap();
    assert_eq!(c.n, 8);
    assert_eq!(c.dealias, 1.0);
    assert_eq!(c.dt, TimeStep::Auto);
    assert_eq!(c.epsilon, 0.5);
    assert_eq!(c.cadence, 1);
    assert!(c.velocity.is_empty() && c.magnetic.is_empty());
    assert_eq!(c.physical_constants(), PhysicalConstants::unity());
    assert!(matches!(c.density, InitialDensity::UniformBall { .. }));
}

#[test]
fn dump_and_reparse_is_a_fixed_point() {
    for text in [MINIMAL.to_string(), small_run(Path::new("somewhere/out"))] {
        let c = RunConfig::parse(&text, false).unwrap();
        let d = c.dump();
        let again = RunConfig::parse(&d, false).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.dump(), d);
    }
    let explicit = format!(
        "{MINIMAL}[constants]\npreset = explicit\nq_h = 2\nm_h = 3\nkappa = 0.1\neta = 0.01\nmu0 = 1.5\nrho_bar = 0.5\n"
    );
    let c = RunConfig::parse(&explicit, false).unwrap();
    assert_eq!(c.physical_constants(), PhysicalConstants::new(2.0, 3.0, 0.1, 0.01, 1.5, 0.5).unwrap());
    assert_eq!(RunConfig::parse(&c.dump(), false).unwrap(), c);
}

#[test]
fn negative_epsilon_names_the_field() {
    let text = MINIMAL.replace("epsilon = 0.5", "epsilon = -1");
    let err = RunConfig::parse(&text, false).unwrap_err();
    assert!(err.violations.iter().any(|v| v.contains("mollifier.epsilon")), "{err}");
}

#[test]
fn every_violation_is_listed() {
    let text = "[grid]\nn = 7\ncolour = red\n[time]\nt_end = -1\n";
    let err = RunConfig::parse(text, false).unwrap_err();
    let joined = err.to_string();
    for needle in ["colour", "mollifier.epsilon"] {
        assert!(joined.contains(needle), "missing `{needle}` in {joined}");
    }
    let text = "[grid]\nn = 7\n[time]\nt_end = -1\n[mollifier]\nepsilon = 0.1\n";
    let err = RunConfig::parse(text, false).unwrap_err();
    assert!(err.violations.len() >= 2, "{err}");
}

#[test]
fn compressible_mode_is_rejected_unless_projected() {
    let text = format!("{MINIMAL}[velocity]\nmode = sin 1 0 0 1 0 0\n");
    let err = RunConfig::parse(&text, false).unwrap_err();
    assert!(err.violations.iter().any(|v| v.contains("velocity.mode #1") && v.contains("sin 1 0 0")), "{err}");
    let ok = RunConfig::parse(&text, true).unwrap();
    assert!(ok.project_init);
}

#[test]
fn checkpoint_round_trip_is_bit_exact() {
    let c = checkpoint(sample_state());
    let back = decode(&encode(&c)).unwrap();
    assert!(same_state(&back.state, &c.state));
    assert_eq!(
        (back.step, back.dt, back.cumulative_dissipation, back.e_total0, back.momentum0, back.mass0),
        (c.step, c.dt, c.cumulative_dissipation, c.e_total0, c.momentum0, c.mass0)
    );
}

#[test]
fn empty_state_round_trips() {
    let grid = Grid::new(4).unwrap();
    let s = PlasmaState::new(
        VectorField::zeros(grid),
        VectorField::zeros(grid),
        ParticleEnsemble::empty(),
        MollifierSpec::identity(),
        PhysicalConstants::unity(),
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.chk");
    write_checkpoint(&path, &checkpoint(s.clone())).unwrap();
    assert!(same_state(&read_checkpoint(&path).unwrap().state, &s));
}

#[test]
fn corrupted_byte_fails_integrity() {
    let bytes = encode(&checkpoint(sample_state()));
    for pos in [20, bytes.len() / 2, bytes.len() - 40, bytes.len() - 1] {
        let mut bad = bytes.clone();
        bad[pos] ^= 0x10;
        assert!(matches!(decode(&bad), Err(CheckpointError::Integrity)), "byte {pos}");
    }
}

#[test]
fn truncated_file_is_refused() {
    let bytes = encode(&checkpoint(sample_state()));
    for len in [3, 12, 40, bytes.len() / 2, bytes.len() - 1] {
        let r = decode(&bytes[..len]);
        assert!(
            matches!(r, Err(CheckpointError::Truncated | CheckpointError::Integrity)),
            "length {len}: {r:?}"
        );
    }
}

#[test]
fn wrong_magic_or_version_is_refused() {
    let mut bytes = encode(&checkpoint(sample_state()));
    let mut bad = bytes.clone();
    bad[0] = b'X';
    assert!(matches!(decode(&bad), Err(CheckpointError::BadMagic)));
    bytes[6] = 2;
    assert!(matches!(decode(&bytes), Err(CheckpointError::Version(2))));
}

#[test]
fn zero_horizon_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let text = small_run(dir.path()).replace("t_end = 0.2", "t_end = 0");
    let cfg = RunConfig::parse(&text, false).unwrap();
    let art = run_simulation(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(art.steps, 0);
    let rows = read_diagnostics_csv(&dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].t, 0.0);
    assert!(art.final_checkpoint.exists());
}

#[test]
fn run_writes_table_and_checkpoints() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&small_run(dir.path()), false).unwrap();
    let art = run_simulation(&cfg, &RunOptions::default()).unwrap();
    assert_eq!(art.steps, 8);
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), CSV_COLUMNS.join(","));
    assert_eq!(
        CSV_COLUMNS.to_vec(),
        [
            "t", "e_fluid", "e_mag", "e_particles", "e_total", "diss_cum", "r1", "r2", "div_u", "div_b", "px", "py",
            "pz", "mass", "balance_residual"
        ]
    );
    let rows = read_diagnostics_csv(&dir.path().join("diagnostics.csv")).unwrap();
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    assert_eq!(times.len(), 5);
    for r in &rows {
        let e = &r.energy;
        assert!((e.e_total - (e.e_fluid + e.e_mag + e.e_particles)).abs() <= 1e-12 * e.e_total);
        assert!(r.div_u < 1e-11 && r.div_b < 1e-11);
        assert_eq!(r.mass, rows[0].mass);
    }
    for k in [3, 6] {
        assert!(dir.path().join(format!("checkpoint_{k:08}.chk")).exists());
    }
    let last = read_checkpoint(&art.final_checkpoint).unwrap();
    assert!(same_state(&last.state, &art.final_state));
}

#[test]
fn restart_reproduces_the_uninterrupted_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&small_run(dir.path()), false).unwrap();
    let full = run_simulation(&cfg, &RunOptions::default()).unwrap();
    let full_csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();

    let resumed = run_simulation(
        &cfg,
        &RunOptions {
            restart: Some(dir.path().join("checkpoint_00000003.chk")),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(same_state(&resumed.final_state, &full.final_state));
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(csv, full_csv);
}

#[test]
fn rerun_with_same_seed_is_bit_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&small_run(a.path()), false).unwrap();
    let first = run_simulation(&cfg, &RunOptions::default()).unwrap();
    let second = run_simulation(
        &cfg,
        &RunOptions {
            output: Some(b.path().to_path_buf()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!(same_state(&first.final_state, &second.final_state));
    let read = |p: &Path| std::fs::read(p.join("diagnostics.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn observer_sees_every_state() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(&small_run(dir.path()), false).unwrap();
    let mut seen = Vec::new();
    run_simulation_with(&cfg, &RunOptions::default(), |k, s| seen.push((k, s.t))).unwrap();
    assert_eq!(seen.len(), 9);
    assert!(seen.windows(2).all(|w| w[1].0 == w[0].0 + 1 && w[1].1 > w[0].1));
}

#[test]
fn unstable_run_keeps_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let text = small_run(dir.path())
        .replace("dt = 0.025", "dt = 5")
        .replace("t_end = 0.2", "t_end = 200")
        .replace("mode = sin 0 1 0 0.5 0 0", "mode = sin 0 1 0 50 0 0");
    let cfg = RunConfig::parse(&text, false).unwrap();
    match run_simulation(&cfg, &RunOptions::default()) {
        Err(Error::Aborted { last_checkpoint, .. }) => {
            assert!(!last_checkpoint.is_empty());
            let rows = read_diagnostics_csv(&dir.path().join("diagnostics.csv")).unwrap();
            assert!(!rows.is_empty());
        }
        other => panic!("expected an aborted run, got {other:?}"),
    }
}
