//! Command line driver: reads a JSON run configuration, runs one of the
//! solver or verification tasks and writes its artifacts to an output
//! directory. Every task writes `report.json`, an array of check reports,
//! and the process exit status is `0` only if all of them pass.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use mdtgn::CheckReport;

pub use config::{Overrides, RunConfig};
pub use error::{CliError, Result};
use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "mdtgn", version, about = "Light-cone solver and verification suite for the 1+1D Maxwell-Dirac-Thirring-Gross-Neveu system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// JSON run configuration; defaults are used for anything omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed of the random inequality suite.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[arg(long, global = true)]
    pub dx: Option<f64>,

    /// Final time of a local run.
    #[arg(long = "T", global = true)]
    pub t: Option<f64>,

    /// End time of the global run.
    #[arg(long, global = true)]
    pub tau: Option<f64>,

    /// Abort when the smallness conditions fail instead of warning.
    #[arg(long, global = true)]
    pub strict_smallness: bool,

    /// Also write per-layer (t, value) series under `plot/`.
    #[arg(long, global = true)]
    pub plot_data: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve and dump the fields.
    Simulate,
    /// Solve and check cone identities, the Gauss and Lorenz laws, the field bounds and gauge invariance.
    Verify,
    /// Random inequality suite.
    Estimates,
    /// Norm table and exact identities for the configured data.
    Norms,
    /// Two-run gauge invariance check over three resolutions.
    Gauge,
    /// Convergence orders of the conservation residuals and of the two schemes.
    Convergence,
    /// Continuation to `tau` with the a priori bounds checked on every layer.
    Global,
}

/// Reports of a finished task.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub reports: Vec<CheckReport>,
}

impl Outcome {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass() {
            0
        } else {
            1
        }
    }
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            dx: self.dx,
            t: self.t,
            tau: self.tau,
            seed: self.seed,
            strict_smallness: self.strict_smallness,
        }
    }

    pub fn load_config(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        config.apply(&self.overrides());
        config.validate()?;
        Ok(config)
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let config = cli.load_config()?;
    match cli.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(format!("cannot start {n} threads: {e}")))?;
            pool.install(|| execute(cli.command, &config, cli))
        }
        None => execute(cli.command, &config, cli),
    }
}

fn execute(command: Command, config: &RunConfig, cli: &Cli) -> Result<Outcome> {
    let out = OutDir::new(&cli.out)?;
    let ctx = commands::Context {
        config,
        out: &out,
        plot_data: cli.plot_data,
    };
    log::info!("running {command:?}");
    let reports = match command {
        Command::Simulate => commands::simulate(&ctx),
        Command::Verify => commands::verify(&ctx),
        Command::Estimates => commands::estimates(&ctx),
        Command::Norms => commands::norms(&ctx),
        Command::Gauge => commands::gauge(&ctx),
        Command::Convergence => commands::convergence(&ctx),
        Command::Global => commands::global(&ctx),
    }?;
    out.write_json("report.json", &reports)?;
    Ok(Outcome { reports })
}
