//! Flat `key = value` experiment configuration.
//!
//! Physical quantities are in units of the cavity frequency unless `omega`
//! is set. Blank lines and `#` comments are ignored; unknown keys are an
//! error so typos do not silently fall back to defaults.

use std::fmt::Write as _;
use std::path::PathBuf;

use jcesd_core::{BellKind, BellSpec, ModelParams, Observable, TruncationPolicy};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Spectrum,
    Dynamics,
    Sweep,
    Validate,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Dynamics => "dynamics",
            Mode::Sweep => "sweep",
            Mode::Validate => "validate",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [Mode::Spectrum, Mode::Dynamics, Mode::Sweep, Mode::Validate]
            .into_iter()
            .find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub mode: Mode,
    pub omega: f64,
    /// Detuning δ = ω − Δ; the atomic splitting follows from it.
    pub detuning: f64,
    pub g1: f64,
    pub g2: f64,
    pub alpha: f64,
    pub bell: BellKind,
    pub t_max: f64,
    pub n_steps: usize,
    /// Coupling grid; each point sets `g1 = g` and `g2 = g·(g2/g1)`.
    pub sweep_g: Vec<f64>,
    pub sweep_delta: Vec<f64>,
    pub policy: TruncationPolicy,
    pub zero_threshold: f64,
    pub output: Option<PathBuf>,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            mode: Mode::Dynamics,
            omega: 1.0,
            detuning: 0.0,
            g1: 0.1,
            g2: 0.1,
            alpha: std::f64::consts::FRAC_PI_4,
            bell: BellKind::AntiCorrelated,
            t_max: 30.0,
            n_steps: 1500,
            sweep_g: Vec::new(),
            sweep_delta: Vec::new(),
            policy: TruncationPolicy::default(),
            zero_threshold: jcesd_core::bipartite::DEFAULT_ZERO_THRESHOLD,
            output: None,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Config(format!("invalid value for `{key}`: {value:?}"))
}

/// A float, or `pi`, `pi/x`, `pi*x`.
pub fn parse_float(key: &str, value: &str) -> Result<f64, CliError> {
    let v = value.trim();
    let parsed = if let Some(rest) = v.strip_prefix("pi") {
        let rest = rest.trim();
        if rest.is_empty() {
            Some(std::f64::consts::PI)
        } else if let Some(d) = rest.strip_prefix('/') {
            d.trim()
                .parse::<f64>()
                .ok()
                .map(|d| std::f64::consts::PI / d)
        } else if let Some(m) = rest.strip_prefix('*') {
            m.trim()
                .parse::<f64>()
                .ok()
                .map(|m| std::f64::consts::PI * m)
        } else {
            None
        }
    } else {
        v.parse::<f64>().ok()
    };
    match parsed {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(bad(key, value)),
    }
}

pub fn parse_list(key: &str, value: &str) -> Result<Vec<f64>, CliError> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|x| parse_float(key, x)).collect()
}

fn parse_usize(key: &str, value: &str) -> Result<usize, CliError> {
    value.trim().parse().map_err(|_| bad(key, value))
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl ExperimentConfig {
    pub fn params1(&self) -> ModelParams {
        ModelParams {
            omega: self.omega,
            delta_atom: self.omega - self.detuning,
            g: self.g1,
            alpha: self.alpha,
        }
    }

    pub fn params2(&self) -> ModelParams {
        ModelParams {
            g: self.g2,
            ..self.params1()
        }
    }

    pub fn bell_spec(&self) -> BellSpec {
        BellSpec {
            kind: self.bell,
            alpha: self.alpha,
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        match key {
            "mode" => self.mode = Mode::parse(value).ok_or_else(|| bad(key, value))?,
            "omega" => self.omega = parse_float(key, value)?,
            "delta" => self.detuning = parse_float(key, value)?,
            "g" => self.g1 = parse_float(key, value)?,
            "g2" => self.g2 = parse_float(key, value)?,
            "alpha" => self.alpha = parse_float(key, value)?,
            "bell" => {
                self.bell = match value {
                    "1" => BellKind::AntiCorrelated,
                    "2" => BellKind::Correlated,
                    _ => return Err(bad(key, value)),
                }
            }
            "tmax" => self.t_max = parse_float(key, value)?,
            "steps" => self.n_steps = parse_usize(key, value)?,
            "sweep_g" => self.sweep_g = parse_list(key, value)?,
            "sweep_delta" => self.sweep_delta = parse_list(key, value)?,
            "ntr" => self.policy = TruncationPolicy::fixed(parse_usize(key, value)?),
            "ntr_initial" => self.policy.n_tr_initial = parse_usize(key, value)?,
            "ntr_max" => self.policy.n_tr_max = parse_usize(key, value)?,
            "tol" => self.policy.convergence_tol = parse_float(key, value)?,
            "observable" => {
                self.policy.observable = match value {
                    "concurrence" => Observable::Concurrence,
                    "spectrum" => Observable::Spectrum,
                    _ => return Err(bad(key, value)),
                }
            }
            "zero_threshold" => self.zero_threshold = parse_float(key, value)?,
            "out" => self.output = (!value.is_empty()).then(|| PathBuf::from(value)),
            "workers" => self.workers = parse_usize(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Parses a config file. Without a `g2` entry both atoms share `g`.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = ExperimentConfig::default();
        let mut g2_set = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            g2_set |= key.trim() == "g2";
            cfg.set(key.trim(), value)?;
        }
        if !g2_set {
            cfg.g2 = cfg.g1;
        }
        Ok(cfg)
    }

    pub fn serialize(&self) -> String {
        let p = &self.policy;
        let observable = match p.observable {
            Observable::Concurrence => "concurrence",
            Observable::Spectrum => "spectrum",
        };
        let bell = match self.bell {
            BellKind::AntiCorrelated => 1,
            BellKind::Correlated => 2,
        };
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("mode", self.mode.name().into());
        kv("omega", self.omega.to_string());
        kv("delta", self.detuning.to_string());
        kv("g", self.g1.to_string());
        kv("g2", self.g2.to_string());
        kv("alpha", self.alpha.to_string());
        kv("bell", bell.to_string());
        kv("tmax", self.t_max.to_string());
        kv("steps", self.n_steps.to_string());
        kv("sweep_g", join(&self.sweep_g));
        kv("sweep_delta", join(&self.sweep_delta));
        kv("ntr_initial", p.n_tr_initial.to_string());
        kv("ntr_max", p.n_tr_max.to_string());
        kv("tol", p.convergence_tol.to_string());
        kv("observable", observable.into());
        kv("zero_threshold", self.zero_threshold.to_string());
        kv(
            "out",
            self.output
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
        );
        kv("workers", self.workers.to_string());
        s
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let cfg = |m: String| Err(CliError::Config(m));
        if !(self.t_max > 0.0) {
            return cfg(format!("tmax must be positive, got {}", self.t_max));
        }
        if self.n_steps < 2 {
            return cfg(format!("steps must be at least 2, got {}", self.n_steps));
        }
        if self.workers == 0 {
            return cfg("workers must be at least 1".into());
        }
        if !(self.zero_threshold > 0.0) {
            return cfg("zero_threshold must be positive".into());
        }
        if self
            .sweep_g
            .iter()
            .chain(&self.sweep_delta)
            .any(|x| !x.is_finite())
        {
            return cfg("sweep grids must be finite".into());
        }
        if self.mode == Mode::Sweep && self.sweep_g.is_empty() && self.sweep_delta.is_empty() {
            return cfg("sweep needs at least one of sweep_g, sweep_delta".into());
        }
        self.params1().validate()?;
        self.params2().validate()?;
        self.policy.validate()?;
        Ok(())
    }
}
