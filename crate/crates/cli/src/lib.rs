//! Command-line front end: reads germ and config files, runs the checks and
//! writes JSON reports and CSV tables.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{Outcome, EXIT_HOLDS, EXIT_INPUT};
use crate::config::{Overrides, RunConfig};

pub use commands::{cmd_gap, cmd_kuo, cmd_kuo2, cmd_regularity, cmd_sample_horn};

#[derive(Debug, Parser)]
#[command(
    name = "stratcheck",
    version,
    about = "Numerical Kuo and stratification regularity checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Kuo condition for f: writes kuo.json and kuo_shells.csv.
    Kuo(RunArgs),
    /// Second Kuo condition for f against each perturbation.
    Kuo2(RunArgs),
    /// Full pipeline on F = f + t (g - f): writes regularity.json and CSVs.
    Regularity(RunArgs),
    /// Samples the horn neighbourhood of f on every shell.
    SampleHorn(RunArgs),
    /// Gap, principal angles and intersection dimension of two subspaces.
    Gap {
        /// JSON array of basis vectors of l.
        l: PathBuf,
        /// JSON array of basis vectors of W.
        w: PathBuf,
        #[arg(long, default_value_t = stratcheck_core::subspace::DEFAULT_ANGLE_TOL)]
        angle_tol: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub shells: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "t-grid")]
    pub t_grid: Option<usize>,
    /// `name=value`; repeatable.
    #[arg(long = "threshold")]
    pub thresholds: Vec<String>,
    /// Germ JSON for f.
    #[arg(long)]
    pub f: Option<PathBuf>,
    /// Germ JSON for g.
    #[arg(long)]
    pub g: Option<PathBuf>,
    /// Germ JSON of a perturbation for `kuo2`; repeatable.
    #[arg(long = "perturbation")]
    pub perturbations: Vec<PathBuf>,
    #[arg(long)]
    pub delta: Option<f64>,
}

impl RunArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            f: self.f.clone(),
            g: self.g.clone(),
            perturbations: self.perturbations.clone(),
            r: self.r,
            delta: self.delta,
            width: self.width,
            shells: self.shells,
            samples: self.samples,
            seed: self.seed,
            t_grid: self.t_grid,
            out: self.out.clone(),
            thresholds: self.thresholds.clone(),
        }
    }

    pub fn config(&self) -> anyhow::Result<RunConfig> {
        RunConfig::from_sources(self.config.as_deref(), &self.overrides())
    }
}

fn run_inner(cli: &Cli) -> anyhow::Result<i32> {
    let (cmd, args): (fn(&RunConfig) -> anyhow::Result<Outcome>, &RunArgs) = match &cli.command {
        Command::Kuo(a) => (cmd_kuo, a),
        Command::Kuo2(a) => (cmd_kuo2, a),
        Command::Regularity(a) => (cmd_regularity, a),
        Command::SampleHorn(a) => (cmd_sample_horn, a),
        Command::Gap { l, w, angle_tol } => {
            println!("{}", cmd_gap(l, w, *angle_tol)?);
            return Ok(EXIT_HOLDS);
        }
    };
    let cfg = args.config()?;
    let outcome = cmd(&cfg)?;
    let written = outcome.outputs.flush(&cfg.out)?;
    println!("{}", outcome.summary);
    for p in written {
        println!("wrote {}", p.display());
    }
    Ok(outcome.code)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match run_inner(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}

/// Parses and runs; usage errors exit with the input-error code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INPUT
            } else {
                EXIT_HOLDS
            };
            let _ = e.print();
            code
        }
    }
}
