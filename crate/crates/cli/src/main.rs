//! `wvlab`: run growth experiments from a TOML config and write CSV/JSON/plot data.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use wvlab_core::experiments::{run_experiment, Experiment, ExperimentConfig, KahaneSpec, PhaseSpec, SequenceSpec};

#[derive(Parser)]
#[command(
    name = "wvlab",
    version,
    about = "Wiman–Valiron growth experiments for power series in the unit disk"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Growth quantities at t = 0 over the radius grid.
    Profile(Common),
    /// M / (h μ ln^{1/2}(hμ)) along the grid.
    Sharpness(Common),
    /// Monte Carlo over the rotation parameter.
    Ensemble(Common),
    /// Check the A, B² and G growth bounds on the grid.
    BoundAudit(Common),
    /// Lower ratio for exp(n^ε) coefficients.
    Baire(Common),
    /// Search for a large real part of Σ c_n e^{iθ_n t}.
    Kahane(Common),
}

#[derive(Args)]
struct Common {
    /// TOML config; without it a per-command default is used.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Grid reaches r = 1 - 10^-kmax.
    #[arg(long)]
    kmax: Option<u32>,
    #[arg(long)]
    trials: Option<usize>,
    /// Comma-separated exceptional-set levels.
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    #[arg(long)]
    delta: Option<f64>,
}

fn default_config(exp: Experiment) -> ExperimentConfig {
    match exp {
        Experiment::Profile => ExperimentConfig::new(SequenceSpec::Geometric),
        Experiment::Sharpness | Experiment::Ensemble | Experiment::BoundAudit => {
            ExperimentConfig::new(SequenceSpec::SqrtExp)
        }
        Experiment::Baire => ExperimentConfig::new(SequenceSpec::PowerExp { epsilon: 0.5 }),
        Experiment::Kahane => {
            let mut c = ExperimentConfig::new(SequenceSpec::Geometric);
            c.phases = PhaseSpec::Geometric { q: 2.0 };
            c.kahane = Some(KahaneSpec {
                coeffs: vec![1.0; 20],
                t_lo: 0.1,
                t_hi: 0.1 + std::f64::consts::PI,
                grid_n: 1 << 20,
            });
            c
        }
    }
}

fn run(exp: Experiment, args: Common) -> Result<()> {
    let (mut cfg, text) = match &args.config {
        Some(path) => ExperimentConfig::load(path).with_context(|| format!("loading {}", path.display()))?,
        None => {
            let cfg = default_config(exp);
            let text = cfg.to_toml()?;
            (cfg, text)
        }
    };
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(k) = args.kmax {
        cfg.grid.k_max = k;
    }
    if let Some(t) = args.trials {
        cfg.trials = t;
    }
    if let Some(e) = args.eta {
        cfg.eta = e;
    }
    if let Some(d) = args.delta {
        cfg.delta = d;
    }
    cfg.validate()?;
    let dir = args.out.unwrap_or_else(|| PathBuf::from(&cfg.output_dir));
    let paths = run_experiment(exp, &cfg, &text, &dir).with_context(|| format!("{} failed", exp.name()))?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (exp, args) = match cli.command {
        Command::Profile(a) => (Experiment::Profile, a),
        Command::Sharpness(a) => (Experiment::Sharpness, a),
        Command::Ensemble(a) => (Experiment::Ensemble, a),
        Command::BoundAudit(a) => (Experiment::BoundAudit, a),
        Command::Baire(a) => (Experiment::Baire, a),
        Command::Kahane(a) => (Experiment::Kahane, a),
    };
    match run(exp, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
