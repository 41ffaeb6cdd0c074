use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use jcesd_core::validate::{run_validation, ValidationConfig, ValidationReport};
use jcesd_core::{uniform_grid, ConcurrenceSeries, Engine, ModelParams};

use crate::config::{ExperimentConfig, Mode};
use crate::error::CliError;
use crate::output::{self, fmt_f, sidecar_path, write_file};

pub fn engine(cfg: &ExperimentConfig) -> Engine {
    let mut e = Engine::new(cfg.policy);
    e.zero_threshold = cfg.zero_threshold;
    e
}

pub fn run_dynamics(cfg: &ExperimentConfig) -> Result<ConcurrenceSeries, CliError> {
    let times = uniform_grid(cfg.t_max, cfg.n_steps)?;
    Ok(engine(cfg).concurrence_series(&cfg.params1(), &cfg.params2(), &cfg.bell_spec(), &times)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepPoint {
    pub g: f64,
    pub delta: f64,
    pub n_tr: Option<usize>,
    pub mean_concurrence: Option<f64>,
    pub esd_intervals: Vec<(f64, f64)>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    /// Long-format CSV sorted by coupling, detuning, then time.
    pub csv: String,
    pub points: Vec<SweepPoint>,
}

pub const SWEEP_HEADER: &str = "g,delta,t,C_exact,C_rwa,C_transformed,n_ph1,n_ph2,norm_err";

/// Grid points `(g, δ)` in ascending order; an empty axis is pinned to the
/// base configuration.
pub fn sweep_grid(cfg: &ExperimentConfig) -> Vec<(f64, f64)> {
    let axis = |values: &[f64], base: f64| {
        let mut v = if values.is_empty() {
            vec![base]
        } else {
            values.to_vec()
        };
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let gs = axis(&cfg.sweep_g, cfg.g1);
    let ds = axis(&cfg.sweep_delta, cfg.detuning);
    gs.iter()
        .flat_map(|&g| ds.iter().map(move |&d| (g, d)))
        .collect()
}

fn point_config(cfg: &ExperimentConfig, g: f64, delta: f64) -> ExperimentConfig {
    let ratio = if cfg.g1 == 0.0 { 1.0 } else { cfg.g2 / cfg.g1 };
    ExperimentConfig {
        g1: g,
        g2: g * ratio,
        detuning: delta,
        ..cfg.clone()
    }
}

fn sweep_point(
    cfg: &ExperimentConfig,
    g: f64,
    delta: f64,
) -> (SweepPoint, Option<ConcurrenceSeries>) {
    let pc = point_config(cfg, g, delta);
    let result = pc
        .params1()
        .validate()
        .and_then(|_| pc.params2().validate())
        .map_err(CliError::from)
        .and_then(|_| run_dynamics(&pc));
    match result {
        Ok(series) => (
            SweepPoint {
                g,
                delta,
                n_tr: Some(series.n_tr),
                mean_concurrence: Some(series.mean_concurrence()),
                esd_intervals: series.esd_intervals.clone(),
                error: None,
            },
            Some(series),
        ),
        Err(e) => {
            log::warn!("sweep point g={g} delta={delta} failed: {e}");
            (
                SweepPoint {
                    g,
                    delta,
                    n_tr: None,
                    mean_concurrence: None,
                    esd_intervals: Vec::new(),
                    error: Some(e.to_string()),
                },
                None,
            )
        }
    }
}

#[cfg(feature = "parallel")]
fn map_points(
    cfg: &ExperimentConfig,
    grid: &[(f64, f64)],
) -> Result<Vec<(SweepPoint, Option<ConcurrenceSeries>)>, CliError> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cfg.workers)))?;
    Ok(pool.install(|| {
        grid.par_iter()
            .map(|&(g, d)| sweep_point(cfg, g, d))
            .collect()
    }))
}

#[cfg(not(feature = "parallel"))]
fn map_points(
    cfg: &ExperimentConfig,
    grid: &[(f64, f64)],
) -> Result<Vec<(SweepPoint, Option<ConcurrenceSeries>)>, CliError> {
    Ok(grid.iter().map(|&(g, d)| sweep_point(cfg, g, d)).collect())
}

/// Runs every grid point on a pool of `cfg.workers` threads. A failing
/// point is recorded with its error and the sweep continues.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput, CliError> {
    uniform_grid(cfg.t_max, cfg.n_steps)?;
    let grid = sweep_grid(cfg);
    let results = map_points(cfg, &grid)?;
    let mut csv = format!("{SWEEP_HEADER}\n");
    for (point, series) in &results {
        if let Some(series) = series {
            let prefix = format!("{},{}", fmt_f(point.g), fmt_f(point.delta));
            for row in output::dynamics_rows(series) {
                let _ = writeln!(csv, "{prefix},{row}");
            }
        }
    }
    Ok(SweepOutput {
        csv,
        points: results.into_iter().map(|(p, _)| p).collect(),
    })
}

pub fn validation_config(cfg: &ExperimentConfig) -> ValidationConfig {
    let mut v = ValidationConfig {
        t_max: cfg.t_max,
        n_steps: cfg.n_steps,
        ..ValidationConfig::default()
    };
    if !cfg.sweep_g.is_empty() {
        v.couplings = cfg.sweep_g.clone();
    }
    v
}

pub fn run_validate(cfg: &ExperimentConfig) -> Result<ValidationReport, CliError> {
    Ok(run_validation(&engine(cfg), &validation_config(cfg))?)
}

fn emit(out: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            write_file(path, contents)?;
            log::info!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

/// Runs the configured mode and writes its outputs.
pub fn execute(cfg: &ExperimentConfig) -> Result<(), CliError> {
    cfg.validate()?;
    let out = cfg.output.as_deref();
    match cfg.mode {
        Mode::Spectrum => {
            let e = engine(cfg);
            let spec = match cfg.policy.is_fixed() {
                true => e.solve_fixed(&cfg.params1(), cfg.policy.n_tr_initial)?,
                false => e.spectrum(&cfg.params1())?,
            };
            emit(out, &output::spectrum_csv(&spec))
        }
        Mode::Dynamics => {
            let series = run_dynamics(cfg)?;
            emit(out, &output::dynamics_csv(&series))?;
            match out {
                Some(path) => {
                    write_file(
                        &sidecar_path(path, "esd.json"),
                        &output::intervals_json(&series.esd_intervals)?,
                    )?;
                    write_file(
                        &sidecar_path(path, "series.csv"),
                        &output::series_csv(&series),
                    )?;
                    write_file(
                        &sidecar_path(path, "sources.csv"),
                        &output::sources_csv(&series),
                    )
                }
                None => {
                    eprintln!("ESD intervals: {:?}", series.esd_intervals);
                    Ok(())
                }
            }
        }
        Mode::Sweep => {
            let result = run_sweep(cfg)?;
            emit(out, &result.csv)?;
            let points = serde_json::to_string_pretty(&result.points)?;
            match out {
                Some(path) => write_file(&sidecar_path(path, "points.json"), &points)?,
                None => eprintln!("{points}"),
            }
            let failed = result.points.iter().filter(|p| p.error.is_some()).count();
            if failed > 0 {
                log::warn!("{failed} of {} sweep points failed", result.points.len());
            }
            Ok(())
        }
        Mode::Validate => {
            let report = run_validate(cfg)?;
            for c in &report.checks {
                eprintln!(
                    "{} {:<20} {:<32} deviation {:.3e} (tol {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.point,
                    c.max_deviation,
                    c.tolerance
                );
            }
            emit(out, &serde_json::to_string_pretty(&report)?)?;
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<_> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{} at {}", c.name, c.point))
                    .collect();
                Err(CliError::ValidationFailed(failed.join("; ")))
            }
        }
    }
}

/// Parameters of one sweep grid point, as used by the sweep.
pub fn sweep_point_params(
    cfg: &ExperimentConfig,
    g: f64,
    delta: f64,
) -> (ModelParams, ModelParams) {
    let pc = point_config(cfg, g, delta);
    (pc.params1(), pc.params2())
}
