//! Cross-validation of the engine against the raw-basis oracle and the
//! weak-coupling analytic limit.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::analytic::concurrence_rwa;
use crate::bipartite::{BellKind, BellSpec};
use crate::dynamics::uniform_grid;
use crate::engine::{max_abs_diff, Engine};
use crate::error::Result;
use crate::model::{displacement_overlap, ModelParams};
use crate::oracle::{oracle_concurrence_series, oracle_spectrum, DEFAULT_ORACLE_FOCK};
use crate::spectral::retained_energies;

#[derive(Debug, Clone, Serialize)]
pub struct ValidationConfig {
    pub couplings: Vec<f64>,
    pub t_max: f64,
    pub n_steps: usize,
    /// Fock levels per cavity in the two-atom oracle.
    pub joint_fock: usize,
    pub concurrence_tol: f64,
    pub spectrum_levels: usize,
    pub spectrum_tol: f64,
    pub rwa_coupling: f64,
    pub rwa_tol: f64,
    pub tail_tol: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            couplings: vec![0.01, 0.1, 0.3, 1.0],
            t_max: 30.0,
            n_steps: 1500,
            joint_fock: 80,
            concurrence_tol: 1e-6,
            spectrum_levels: 20,
            spectrum_tol: 1e-8,
            rwa_coupling: 1e-4,
            rwa_tol: 1e-3,
            tail_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub point: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(name: &str, point: String, max_deviation: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            point,
            max_deviation,
            tolerance,
            // NaN deviations fail
            passed: max_deviation <= tolerance,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

/// Bell states used by the oracle comparison: `α = π/4` anti-correlated and
/// `α = π/12` correlated.
pub fn reference_bells() -> [BellSpec; 2] {
    [
        BellSpec::anti_correlated(FRAC_PI_4),
        BellSpec::correlated(PI / 12.0),
    ]
}

/// Overlap kernel with the sign of every off-diagonal element flipped. Only
/// meant to show that the suite catches a broken kernel.
pub fn sign_flipped_overlap(m: usize, n: usize, g: f64) -> f64 {
    let d = displacement_overlap(m, n, g);
    if m == n {
        d
    } else {
        -d
    }
}

fn bell_label(bell: &BellSpec) -> &'static str {
    match bell.kind {
        BellKind::AntiCorrelated => "bell1",
        BellKind::Correlated => "bell2",
    }
}

pub fn run_validation(engine: &Engine, config: &ValidationConfig) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    let times = uniform_grid(config.t_max, config.n_steps)?;

    for &g in &config.couplings {
        let p = ModelParams::resonant(g, 0.0);

        let mut spec = engine.spectrum(&p)?;
        let ours = loop {
            let (retained, complete_below) = retained_energies(&spec);
            let enough = retained
                .get(config.spectrum_levels.saturating_sub(1))
                .is_some_and(|&e| e <= complete_below);
            if enough || spec.n_tr >= engine.policy.n_tr_max {
                break retained;
            }
            spec = engine.solve_fixed(&p, 2 * spec.n_tr)?;
        };
        let exact = oracle_spectrum(&p, DEFAULT_ORACLE_FOCK)?;
        let compared = config.spectrum_levels.min(ours.len());
        let dev = if compared < config.spectrum_levels {
            f64::INFINITY
        } else {
            ours.iter()
                .zip(&exact)
                .take(compared)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        checks.push(CheckResult::new(
            "spectrum",
            format!("g={g}"),
            dev,
            config.spectrum_tol,
        ));

        for bell in reference_bells() {
            let point = format!("g={g} {} alpha={:.6}", bell_label(&bell), bell.alpha);
            let series = engine.concurrence_series(&p, &p, &bell, &times)?;
            let oracle = oracle_concurrence_series(&p, &p, &bell, &times, config.joint_fock)?;
            checks.push(CheckResult::new(
                "oracle_concurrence",
                point.clone(),
                max_abs_diff(&series.concurrence, &oracle.concurrence),
                config.concurrence_tol,
            ));
            checks.push(CheckResult::new(
                "oracle_tail_mass",
                point,
                oracle.tail_mass,
                config.tail_tol,
            ));
        }
    }

    let g = config.rwa_coupling;
    let p = ModelParams::resonant(g, 0.0);
    let bell = BellSpec::anti_correlated(FRAC_PI_4);
    let period = uniform_grid(PI / g, 2001)?;
    let series = engine.concurrence_series(&p, &p, &bell, &period)?;
    let rwa: Vec<f64> = period
        .iter()
        .map(|&t| concurrence_rwa(&p, &bell, t))
        .collect();
    checks.push(CheckResult::new(
        "rwa_limit",
        format!("g={g} bell1 alpha=pi/4"),
        max_abs_diff(&series.concurrence, &rwa),
        config.rwa_tol,
    ));

    Ok(ValidationReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
