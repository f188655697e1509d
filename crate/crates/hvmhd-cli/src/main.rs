use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hvmhd::coupled::{cfl_dt, fixed_point_solve, initial_state, run_simulation, RunOptions};
use hvmhd::density::InitialDensity;
use hvmhd::diagnostics::{
    conserved_quantities, ensemble_bound_report, moment_bound_report, weak_residual, ScalarTest, SpaceFactor,
    TestSuite, VectorTest, VelocityFactor, WeakEquation,
};
use hvmhd::io::{read_checkpoint, RunConfig, TimeStep};
use hvmhd::mhd_linear::{integrate_linear_mhd, verify_energy_identity, LinearMHDProblem};
use hvmhd::mollifier::{prepare_initial_f, MollifierSpec};
use hvmhd::spectral::{identity_suite, random, Grid, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hvmhd", version, about = "Mollified hybrid Vlasov-MHD solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Run configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Random seed (overrides the configuration).
    #[arg(long)]
    seed: Option<u64>,
    /// Sequential execution with fixed reduction order.
    #[arg(long)]
    deterministic: bool,
    /// Project non-solenoidal initial modes instead of rejecting them.
    #[arg(long)]
    project_init: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration to its horizon, writing CSV and checkpoints.
    Run {
        #[command(flatten)]
        common: Common,
        /// Continue from a checkpoint.
        #[arg(long)]
        restart: Option<PathBuf>,
    },
    /// Picard iteration of the linearized map on the configured horizon.
    FixedPoint {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 40)]
        max_iter: usize,
    },
    /// Galerkin solver demonstrations.
    Galerkin {
        #[arg(long, value_enum)]
        demo: Demo,
        #[command(flatten)]
        common: Common,
    },
    /// Numerical checks of identities, moment bounds or weak forms.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        common: Common,
    },
    /// Print the header and totals of a checkpoint.
    CheckpointInfo { path: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Heat,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Identities,
    Moments,
    Weak,
}

/// Result of a subcommand: a JSON report and whether every check passed.
struct Outcome {
    report: Value,
    failures: Vec<String>,
}

type CliResult = Result<Outcome, Box<dyn std::error::Error>>;

fn load(common: &Common) -> Result<RunConfig, Box<dyn std::error::Error>> {
    let path = common.config.as_deref().ok_or("--config is required for this command")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let cfg = RunConfig::parse(&text, common.project_init)?;
    if common.deterministic || cfg.deterministic {
        hvmhd::par::set_sequential(true);
    }
    Ok(cfg)
}

fn cmd_run(common: &Common, restart: Option<PathBuf>) -> CliResult {
    let cfg = load(common)?;
    let opts = RunOptions {
        output: common.out.clone(),
        restart,
        seed: common.seed,
    };
    let art = run_simulation(&cfg, &opts)?;
    let last = art.rows.last().copied().unwrap_or_default();
    let e0 = last.energy.e_total - last.energy.balance_residual + last.energy.cumulative_dissipation;
    println!("steps {}  dt {:.6e}  t {}", art.steps, art.dt, art.final_state.t);
    println!(
        "e_total {:.10e}  balance residual {:.3e} (relative {:.3e})",
        last.energy.e_total,
        last.energy.balance_residual,
        last.energy.balance_residual / e0.abs().max(f64::MIN_POSITIVE)
    );
    println!("outputs in {}", art.output.display());
    Ok(Outcome {
        report: json!({
            "steps": art.steps,
            "dt": art.dt,
            "t": art.final_state.t,
            "e_total": last.energy.e_total,
            "balance_residual": last.energy.balance_residual,
            "output": art.output,
            "final_checkpoint": art.final_checkpoint,
            "empty_ensemble": art.empty_ensemble,
        }),
        failures: vec![],
    })
}

fn cmd_fixed_point(common: &Common, tol: f64, max_iter: usize) -> CliResult {
    let cfg = load(common)?;
    let (state, _) = initial_state(&cfg, common.seed.unwrap_or(cfg.seed))?;
    let target = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => cfl_dt(&state).min(cfg.t_end),
    };
    let steps = (cfg.t_end / target - 1e-9).ceil().max(1.0);
    let dt = cfg.t_end / steps;
    let res = fixed_point_solve(&state, cfg.t_end, dt, tol, max_iter)?;
    let e0 = state.total_energy();
    println!("{:>4}  {:>14}  {:>14}", "iter", "change", "max |R|");
    for (i, (c, r)) in res.change_history.iter().zip(&res.remainder_history).enumerate() {
        println!("{:>4}  {c:>14.6e}  {r:>14.6e}", i + 1);
    }
    println!("converged: {}  (E0 = {e0:.6e})", res.converged);
    let mut failures = vec![];
    if !res.converged {
        failures.push(format!("no convergence within {max_iter} iterations"));
    }
    Ok(Outcome {
        report: json!({
            "converged": res.converged,
            "iterations": res.iterations(),
            "dt": dt,
            "change_history": res.change_history,
            "remainder_history": res.remainder_history,
            "e0": e0,
        }),
        failures,
    })
}

fn cmd_galerkin(common: &Common) -> CliResult {
    let grid = Grid::new(8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed.unwrap_or(0));
    let unit = |v: VectorField| {
        let s = 1.0 / v.norm_l2_sq().sqrt();
        v.scaled(s)
    };
    let u0 = unit(random::solenoidal(grid, 2, &mut rng));
    let b0 = unit(random::solenoidal(grid, 2, &mut rng));
    let problem = LinearMHDProblem::unforced(u0, b0, 0.5)?;
    let traj = integrate_linear_mhd(&problem, 80, 0.002)?;
    let residual = verify_energy_identity(&traj, &problem);
    println!("heat decay, 80 modes, T = 0.5, dt = 0.002");
    println!("energy identity residual {residual:.3e}");
    let mut failures = vec![];
    if !(residual < 1e-8) {
        failures.push(format!("energy identity residual {residual:e} exceeds 1e-8"));
    }
    Ok(Outcome {
        report: json!({ "demo": "heat", "energy_identity_residual": residual }),
        failures,
    })
}

fn verify_identities(common: &Common) -> CliResult {
    let worst = identity_suite(Grid::new(32)?, 20, 8, common.seed.unwrap_or(0))?;
    println!("{:>8}  {:>12}", "identity", "max residual");
    let mut failures = vec![];
    let mut table = serde_json::Map::new();
    for (id, r) in worst {
        println!("{:>8}  {r:>12.3e}", id.name());
        table.insert(id.name().into(), json!(r));
        if !(r < 1e-10) {
            failures.push(format!("{} residual {r:e} exceeds 1e-10", id.name()));
        }
    }
    Ok(Outcome {
        report: json!({ "sets": 20, "grid": 32, "residuals": table }),
        failures,
    })
}

fn verify_moments(common: &Common) -> CliResult {
    let grid = Grid::new(8)?;
    let ks = [0.0, 0.5, 1.0, 1.5, 2.0];
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed.unwrap_or(0));
    let mut worst = [0.0f64; 5];
    let mut failures = vec![];
    for trial in 0..100u64 {
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
        let ens = prepare_initial_f(&density, &MollifierSpec::identity(), 20_000, trial)?.ensemble;
        for (i, &k) in ks.iter().enumerate() {
            let r = ensemble_bound_report(&ens, grid, density.sup(), k)?;
            worst[i] = worst[i].max(r.ratio);
            if !r.holds {
                failures.push(format!("ensemble {trial}, k = {k}: ratio {}", r.ratio));
            }
        }
    }
    println!("{:>4}  {:>18}  {:>14}", "k", "worst ratio (100)", "uniform ball");
    let mut rows = vec![];
    let vol = (2.0 * std::f64::consts::PI).powi(3);
    let e = 0.5 * vol * 4.0 * std::f64::consts::PI / 5.0;
    for (i, &k) in ks.iter().enumerate() {
        let mk = 4.0 * std::f64::consts::PI / (3.0 + k);
        let ball = moment_bound_report(&vec![mk; grid.physical_len()], grid, 1.0, e, k)?;
        let a: f64 = (2.0 - k) / 5.0;
        let closed = a.powf(a);
        if (ball.ratio - closed).abs() > 1e-12 {
            failures.push(format!("uniform ball k = {k}: ratio {} vs closed form {closed}", ball.ratio));
        }
        println!("{k:>4}  {:>18.6}  {:>14.6}", worst[i], ball.ratio);
        rows.push(json!({ "k": k, "worst_ratio": worst[i], "uniform_ball_ratio": ball.ratio }));
    }
    Ok(Outcome {
        report: json!({ "ensembles": 100, "rows": rows }),
        failures,
    })
}

fn verify_weak(common: &Common) -> CliResult {
    let cfg = match &common.config {
        Some(_) => load(common)?,
        None => RunConfig::parse(
            "[grid]\nn = 8\n[time]\nt_end = 0.25\ndt = 0.025\n[mollifier]\nepsilon = 0.5\n\
             [particles]\nmarkers = 2000\n[velocity]\nmode = sin 0 1 0 0.3 0 0\n\
             [magnetic]\nmode = cos 1 0 0 0 0 0.5\n",
            false,
        )?,
    };
    let (mut state, _) = initial_state(&cfg, common.seed.unwrap_or(cfg.seed))?;
    let dt = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => cfl_dt(&state),
    };
    let steps = (cfg.t_end / dt).ceil().max(1.0) as usize;
    let dt = cfg.t_end / steps as f64;
    let mut history = vec![state.clone()];
    for _ in 0..steps {
        state = hvmhd::coupled::step(&state, dt)?;
        history.push(state.clone());
    }
    let unit = |i: usize| {
        let mut a = [0.0; 3];
        a[i] = 1.0;
        VectorTest {
            time: vec![1.0],
            k: [0, 0, 0],
            amplitude: a,
            sine: false,
        }
    };
    let mut scalar = vec![ScalarTest {
        time: vec![1.0, 1.0],
        space: SpaceFactor::One,
        velocity: VelocityFactor::One,
    }];
    scalar.extend((0..3).map(|i| ScalarTest {
        time: vec![1.0],
        space: SpaceFactor::One,
        velocity: VelocityFactor::Component(i),
    }));
    scalar.push(ScalarTest {
        time: vec![1.0, -1.0],
        space: SpaceFactor::Cos([1, 0, 0]),
        velocity: VelocityFactor::Bump {
            center: [0.0; 3],
            radius: 1.5,
        },
    });
    let mut vector: Vec<VectorTest> = (0..3).map(unit).collect();
    vector.push(VectorTest {
        time: vec![1.0, 0.5],
        k: [0, 1, 0],
        amplitude: [1.0, 0.0, 0.5],
        sine: true,
    });
    let suite = TestSuite { scalar, vector };
    let rows = weak_residual(&history, &suite)?;
    println!("{:>10}  {:>5}  {:>14}  {:>14}  {:>12}", "equation", "test", "lhs", "rhs", "residual");
    for r in &rows {
        println!(
            "{:>10}  {:>5}  {:>14.6e}  {:>14.6e}  {:>12.3e}",
            format!("{:?}", r.equation),
            r.index,
            r.lhs,
            r.rhs,
            r.residual
        );
    }
    let mut failures = vec![];
    let mass = history[0].particles.total_weight();
    if rows[0].residual > 1e-12 * mass.max(1.0) {
        failures.push(format!("mass reduction residual {:e}", rows[0].residual));
    }
    let (p0, _) = conserved_quantities(&history[0]);
    let (p1, _) = conserved_quantities(history.last().expect("nonempty"));
    let momentum: Vec<_> = rows.iter().filter(|r| r.equation == WeakEquation::Momentum).collect();
    let scale = p0.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    for i in 0..3 {
        let c = &history[0].constants;
        let change = c.rho_bar * momentum[i].lhs + c.m_h * rows[1 + i].lhs;
        let gap = (change - (p1[i] - p0[i])).abs();
        if gap > 1e-12 * scale {
            failures.push(format!("momentum reduction, component {i}: mismatch {gap:e}"));
        }
    }
    let table: Vec<Value> = rows
        .iter()
        .map(|r| json!({ "equation": format!("{:?}", r.equation), "index": r.index, "lhs": r.lhs, "rhs": r.rhs, "residual": r.residual }))
        .collect();
    Ok(Outcome {
        report: json!({ "steps": steps, "dt": dt, "rows": table }),
        failures,
    })
}

fn cmd_checkpoint_info(path: &Path) -> CliResult {
    let c = read_checkpoint(path)?;
    let s = &c.state;
    let report = json!({
        "t": s.t,
        "step": c.step,
        "dt": c.dt,
        "n": s.grid().n(),
        "dealias": s.grid().dealias_fraction(),
        "epsilon": s.mollifier.epsilon(),
        "markers": s.particles.len(),
        "e_total": s.total_energy(),
        "e_total0": c.e_total0,
        "cumulative_dissipation": c.cumulative_dissipation,
        "momentum0": c.momentum0,
        "mass0": c.mass0,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(Outcome {
        report,
        failures: vec![],
    })
}

fn cap_threads() {
    #[cfg(feature = "parallel")]
    if let Some(n) = std::env::var("HVMHD_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            log::warn!("could not cap worker threads: {e}");
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    cap_threads();
    let cli = Cli::parse();
    let (name, result) = match &cli.command {
        Command::Run { common, restart } => ("run", cmd_run(common, restart.clone())),
        Command::FixedPoint { common, tol, max_iter } => ("fixed-point", cmd_fixed_point(common, *tol, *max_iter)),
        Command::Galerkin { demo: Demo::Heat, common } => ("galerkin", cmd_galerkin(common)),
        Command::Verify { suite, common } => match suite {
            Suite::Identities => ("verify identities", verify_identities(common)),
            Suite::Moments => ("verify moments", verify_moments(common)),
            Suite::Weak => ("verify weak", verify_weak(common)),
        },
        Command::CheckpointInfo { path } => ("checkpoint-info", cmd_checkpoint_info(path)),
    };
    let (summary, ok) = match result {
        Ok(o) if o.failures.is_empty() => (json!({ "command": name, "status": "pass", "report": o.report }), true),
        Ok(o) => (
            json!({ "command": name, "status": "fail", "failures": o.failures, "report": o.report }),
            false,
        ),
        Err(e) => (json!({ "command": name, "status": "error", "failures": [e.to_string()] }), false),
    };
    if ok {
        println!("{summary}");
        ExitCode::SUCCESS
    } else {
        eprintln!("{summary}");
        ExitCode::FAILURE
    }
}
