use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use jcesd_cli::config::parse_list;
use jcesd_cli::error::EXIT_OK;
use jcesd_cli::{execute, CliError, ExperimentConfig, Mode};

/// Entanglement dynamics of two atoms in separate cavities beyond the
/// rotating-wave approximation.
#[derive(Parser)]
#[command(name = "jcesd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Energy levels of one subsystem (index, parity, energy, n_tr).
    Spectrum(Common),
    /// Concurrence and photon numbers over time, with ESD intervals.
    Dynamics(Common),
    /// Dynamics over a grid of couplings and/or detunings.
    Sweep(Common),
    /// Cross-check the engine against the brute-force oracle.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// `key = value` file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Coupling of atom 1 in units of ω.
    #[arg(long)]
    g: Option<f64>,
    /// Coupling of atom 2 (defaults to --g).
    #[arg(long)]
    g2: Option<f64>,
    /// Detuning δ = ω − Δ.
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Bell-state angle; accepts `pi/12` style values.
    #[arg(long)]
    alpha: Option<String>,
    /// 1: cosα|↑↓⟩ + sinα|↓↑⟩, 2: cosα|↑↑⟩ + sinα|↓↓⟩.
    #[arg(long, value_parser = ["1", "2"])]
    bell: Option<String>,
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of time samples including t = 0.
    #[arg(long)]
    steps: Option<usize>,
    /// Fix the truncation instead of searching for it.
    #[arg(long)]
    ntr: Option<usize>,
    /// Comma-separated couplings for `sweep` (and `validate`).
    #[arg(long, allow_hyphen_values = true)]
    sweep_g: Option<String>,
    /// Comma-separated detunings for `sweep`.
    #[arg(long, allow_hyphen_values = true)]
    sweep_delta: Option<String>,
    #[arg(long)]
    workers: Option<usize>,
    /// Output file; stdout when omitted. Sidecars are written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn build_config(mode: Mode, args: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            ExperimentConfig::parse(&text)?
        }
        None => ExperimentConfig::default(),
    };
    cfg.mode = mode;
    if let Some(g) = args.g {
        if cfg.g2 == cfg.g1 {
            cfg.g2 = g;
        }
        cfg.g1 = g;
    }
    if let Some(g2) = args.g2 {
        cfg.g2 = g2;
    }
    if let Some(d) = args.delta {
        cfg.detuning = d;
    }
    if let Some(a) = &args.alpha {
        cfg.set("alpha", a)?;
    }
    if let Some(b) = &args.bell {
        cfg.set("bell", b)?;
    }
    if let Some(t) = args.tmax {
        cfg.t_max = t;
    }
    if let Some(n) = args.steps {
        cfg.n_steps = n;
    }
    if let Some(n) = args.ntr {
        cfg.set("ntr", &n.to_string())?;
    }
    if let Some(list) = &args.sweep_g {
        cfg.sweep_g = parse_list("sweep_g", list)?;
    }
    if let Some(list) = &args.sweep_delta {
        cfg.sweep_delta = parse_list("sweep_delta", list)?;
    }
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(out) = &args.out {
        cfg.output = Some(out.clone());
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Spectrum(a) => (Mode::Spectrum, a),
        Command::Dynamics(a) => (Mode::Dynamics, a),
        Command::Sweep(a) => (Mode::Sweep, a),
        Command::Validate(a) => (Mode::Validate, a),
    };
    let code = match build_config(mode, args).and_then(|cfg| execute(&cfg)) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
