//! Command-line front end for the `quasi1d` solvers.
//!
//! Every subcommand writes one or more CSV tables, the fully resolved
//! configuration (`<stem>.config.toml`, accepted back by `--config`) and a
//! JSON manifest with output hashes and per-point diagnostics.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use commands::continuum::ContinuumArgs;
use commands::figure::{run_figure, FigureArgs};
use commands::oracle::OracleArgs;
use commands::resonances::ResonancesArgs;
use commands::ring::RingArgs;
use commands::single::SingleArgs;
use commands::spa_fit::SpaFitArgs;
use commands::transverse::TransverseArgs;
use commands::twobody::TwoBodyArgs;
use commands::{run_command, Ctx};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "quasi1d", version, about = "Confinement-induced resonances on a lattice")]
pub struct Cli {
    /// TOML file with option values; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Enable validation-only commands.
    #[arg(long, global = true)]
    pub validate: bool,
    /// Suppress the stdout summary.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Commands,
}

#[derive(Debug, Subcommand)]
pub enum Commands {
    /// Transverse eigenstates of a trap.
    Transverse(TransverseArgs),
    /// Single-particle effective coupling sweep.
    Single(SingleArgs),
    /// Delta-well resonance position against the well depth.
    Continuum(ContinuumArgs),
    /// Single-particle levels on finite rings.
    Ring(RingArgs),
    /// Two-body effective coupling sweep.
    Twobody(TwoBodyArgs),
    /// Single-pole fit at strong attraction.
    SpaFit(SpaFitArgs),
    /// Two-body resonances in a coupling window.
    Resonances(ResonancesArgs),
    /// Brute-force strip comparison (needs --validate).
    #[command(hide = true)]
    Oracle(OracleArgs),
    /// Regenerate the data of a canned figure.
    Figure(FigureArgs),
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let file = cli.config.as_deref().map(config::read_config).transpose()?;
    let ctx = Ctx::new(cli.threads, cli.quiet)?;
    let file = file.as_ref();
    let out = &cli.out;
    match &cli.command {
        Commands::Transverse(a) => run_command(a, file, &ctx, out, "transverse").map(drop),
        Commands::Single(a) => run_command(a, file, &ctx, out, "single").map(drop),
        Commands::Continuum(a) => run_command(a, file, &ctx, out, "continuum").map(drop),
        Commands::Ring(a) => run_command(a, file, &ctx, out, "ring").map(drop),
        Commands::Twobody(a) => run_command(a, file, &ctx, out, "twobody").map(drop),
        Commands::SpaFit(a) => run_command(a, file, &ctx, out, "spa_fit").map(drop),
        Commands::Resonances(a) => run_command(a, file, &ctx, out, "resonances").map(drop),
        Commands::Oracle(a) => {
            if !cli.validate {
                return Err(error::config_err("the oracle command needs --validate"));
            }
            run_command(a, file, &ctx, out, "oracle").map(drop)
        }
        Commands::Figure(a) => {
            if file.is_some() {
                return Err(error::config_err("figure recipes take no config file"));
            }
            run_figure(&a.name, &ctx, out)
        }
    }
}
