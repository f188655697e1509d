use std::path::{Path, PathBuf};

use super::{cfl_dt, step, PlasmaState};
use crate::diagnostics::{conserved_quantities, diagnostics_row, DiagnosticsRow, EnergyTracker};
use crate::error::{Error, Result};
use crate::io::{read_checkpoint, write_checkpoint, Checkpoint, DiagnosticsCsv, FourierMode, RunConfig, TimeStep};
use crate::mollifier::{prepare_initial_f, MollifierSpec};
use crate::spectral::{leray_project, Grid, VectorField};

pub const CSV_NAME: &str = "diagnostics.csv";
pub const CONFIG_NAME: &str = "config.resolved";
pub const FINAL_CHECKPOINT: &str = "final.chk";

pub fn checkpoint_name(step: u64) -> String {
    format!("checkpoint_{step:08}.chk")
}

#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// Replaces the configured output directory.
    pub output: Option<PathBuf>,
    /// Continue from this checkpoint instead of sampling initial data.
    pub restart: Option<PathBuf>,
    /// Replaces the configured seed.
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct RunArtifacts {
    pub final_state: PlasmaState,
    /// Rows written during this invocation.
    pub rows: Vec<DiagnosticsRow>,
    pub steps: u64,
    pub dt: f64,
    pub output: PathBuf,
    pub final_checkpoint: PathBuf,
    /// Set when the sampled ensemble came out empty.
    pub empty_ensemble: bool,
}

fn mode_sum(grid: Grid, modes: &[FourierMode]) -> VectorField {
    VectorField::from_fn(grid, |x| {
        let mut s = [0.0; 3];
        for m in modes {
            let v = m.value(x);
            for d in 0..3 {
                s[d] += v[d];
            }
        }
        s
    })
}

/// Sampled markers and summed Fourier modes at `t = 0`; the flag reports an
/// empty ensemble.
pub fn initial_state(cfg: &RunConfig, seed: u64) -> Result<(PlasmaState, bool)> {
    let grid = Grid::with_dealias(cfg.n, cfg.dealias)?;
    let spec = MollifierSpec::new(cfg.epsilon)?;
    let prepared = prepare_initial_f(&cfg.density, &spec, cfg.markers, seed)?;
    if prepared.flagged_empty {
        log::warn!("initial ensemble is empty (no mass below the velocity cut-off)");
    }
    let mut u = mode_sum(grid, &cfg.velocity);
    let mut b = mode_sum(grid, &cfg.magnetic);
    if cfg.project_init {
        u = leray_project(&u);
        b = leray_project(&b);
    }
    let state = PlasmaState::new(u, b, prepared.ensemble, spec, cfg.physical_constants())?;
    Ok((state, prepared.flagged_empty))
}

/// Steps and uniform step size covering `[0, t_end]`.
fn schedule(cfg: &RunConfig, state: &PlasmaState) -> Result<(u64, f64)> {
    if cfg.t_end == 0.0 {
        return Ok((0, 0.0));
    }
    let target = match cfg.dt {
        TimeStep::Fixed(dt) => dt,
        TimeStep::Auto => cfl_dt(state).min(cfg.t_end),
    };
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::param("dt", format!("no usable step size ({target})")));
    }
    let steps = (cfg.t_end / target - 1e-9).ceil().max(1.0) as u64;
    Ok((steps, cfg.t_end / steps as f64))
}

fn rows_through(step: u64, cadence: u64, total: u64) -> usize {
    let regular = (step / cadence + 1) as usize;
    regular + usize::from(step == total && step % cadence != 0)
}

pub fn run_simulation(cfg: &RunConfig, opts: &RunOptions) -> Result<RunArtifacts> {
    run_simulation_with(cfg, opts, |_, _| {})
}

/// Integrate to `t_end`, writing diagnostics rows every `cadence` steps and
/// checkpoints every `checkpoint_every` steps plus at the end. `observer`
/// sees every state, including the initial one.
pub fn run_simulation_with<F>(cfg: &RunConfig, opts: &RunOptions, mut observer: F) -> Result<RunArtifacts>
where
    F: FnMut(u64, &PlasmaState),
{
    let violations = cfg.violations();
    if !violations.is_empty() {
        return Err(crate::io::ConfigError { violations }.into());
    }
    let out = opts.output.clone().unwrap_or_else(|| cfg.output.clone());
    std::fs::create_dir_all(&out)?;
    std::fs::write(out.join(CONFIG_NAME), cfg.dump())?;
    let csv_path = out.join(CSV_NAME);
    let cadence = cfg.cadence.max(1) as u64;

    let (mut state, start, total, dt, mut tracker, momentum0, mass0, mut csv, empty_ensemble) = match &opts.restart {
        Some(path) => {
            let c = read_checkpoint(path)?;
            let total = if c.dt > 0.0 { (cfg.t_end / c.dt).round() as u64 } else { 0 };
            if c.step > total {
                return Err(Error::Input(format!(
                    "checkpoint step {} lies beyond the configured horizon ({total} steps)",
                    c.step
                )));
            }
            let tracker = EnergyTracker::resume(&c.state, c.e_total0, c.cumulative_dissipation);
            let beside = path.parent().map(|d| d.join(CSV_NAME));
            let source = [Some(csv_path.clone()), beside].into_iter().flatten().find(|p| p.is_file());
            let csv = match source {
                Some(src) => DiagnosticsCsv::resume(&src, &csv_path, rows_through(c.step, cadence, total))?,
                None => DiagnosticsCsv::create(&csv_path)?,
            };
            let empty = c.state.particles.is_empty();
            (c.state, c.step, total, c.dt, tracker, c.momentum0, c.mass0, csv, empty)
        }
        None => {
            let (state, empty) = initial_state(cfg, opts.seed.unwrap_or(cfg.seed))?;
            let (total, dt) = schedule(cfg, &state)?;
            let tracker = EnergyTracker::new(&state);
            let (momentum0, mass0) = conserved_quantities(&state);
            let csv = DiagnosticsCsv::create(&csv_path)?;
            (state, 0, total, dt, tracker, momentum0, mass0, csv, empty)
        }
    };
    log::info!("running {} steps of dt = {dt:.6e} to t = {}", total - start, cfg.t_end);

    let mut rows = Vec::new();
    let mut last_checkpoint: Option<PathBuf> = opts.restart.clone();
    let save = |state: &PlasmaState, k: u64, tracker: &EnergyTracker, path: &Path| {
        write_checkpoint(
            path,
            &Checkpoint {
                state: state.clone(),
                step: k,
                dt,
                cumulative_dissipation: tracker.cumulative_dissipation,
                e_total0: tracker.e_total0,
                momentum0,
                mass0,
            },
        )
    };

    observer(start, &state);
    if start == 0 {
        let row = diagnostics_row(&state, &tracker);
        csv.write_row(&row)?;
        rows.push(row);
    }
    for k in start + 1..=total {
        let next = match step(&state, dt) {
            Ok(s) => s,
            Err(e) => {
                return Err(Error::Aborted {
                    step: k,
                    last_checkpoint: match &last_checkpoint {
                        Some(p) => format!("last good checkpoint {}", p.display()),
                        None => "no checkpoint written".into(),
                    },
                    source: Box::new(e),
                })
            }
        };
        state = next;
        tracker.update(&state);
        observer(k, &state);
        if k % cadence == 0 || k == total {
            let row = diagnostics_row(&state, &tracker);
            csv.write_row(&row)?;
            rows.push(row);
        }
        if cfg.checkpoint_every > 0 && k % cfg.checkpoint_every as u64 == 0 && k != total {
            let path = out.join(checkpoint_name(k));
            save(&state, k, &tracker, &path)?;
            last_checkpoint = Some(path);
        }
    }
    let final_checkpoint = out.join(FINAL_CHECKPOINT);
    save(&state, total, &tracker, &final_checkpoint)?;
    Ok(RunArtifacts {
        final_state: state,
        rows,
        steps: total,
        dt,
        output: out,
        final_checkpoint,
        empty_ensemble,
    })
}
