use std::path::Path;

use clap::Args;
use quasi1d::twobody::{build_kernel, KernelParams, OverlapKernel};
use quasi1d::{solve_transverse, TransverseSpectrum};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{merge, TrapArgs, TrapName};
use crate::error::{config_err, CliError};
use crate::output::{write_run, Artifacts};

pub mod continuum;
pub mod figure;
pub mod oracle;
pub mod resonances;
pub mod ring;
pub mod single;
pub mod spa_fit;
pub mod transverse;
pub mod twobody;

pub struct Ctx {
    pool: rayon::ThreadPool,
    pub quiet: bool,
}

impl Ctx {
    pub fn new(threads: Option<usize>, quiet: bool) -> Result<Self, CliError> {
        if threads == Some(0) {
            return Err(config_err("--threads must be at least 1"));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()
            .map_err(|e| config_err(e.to_string()))?;
        Ok(Self { pool, quiet })
    }

    /// Maps `f` over `items` in parallel, keeping input order.
    pub fn map<T: Sync, R: Send>(&self, items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
        self.pool.install(|| items.par_iter().map(f).collect())
    }
}

pub trait Command: Serialize + DeserializeOwned + Clone {
    const NAME: &'static str;

    /// Fills defaults and checks everything that does not need a solve.
    fn resolve(&mut self) -> Result<(), CliError>;

    fn execute(&self, ctx: &Ctx) -> Result<Artifacts, CliError>;
}

/// Resolves `flags` over `file`, runs the command and writes its artifacts.
pub fn run_command<C: Command>(flags: &C, file: Option<&toml::Table>, ctx: &Ctx, dir: &Path, stem: &str) -> Result<Artifacts, CliError> {
    let mut config = merge(flags, file)?;
    config.resolve()?;
    let artifacts = config.execute(ctx)?;
    let table = toml::Table::try_from(&config).map_err(|e| config_err(e.to_string()))?;
    let written = write_run(dir, stem, C::NAME, &table, &artifacts)?;
    if !ctx.quiet {
        for line in &artifacts.summary {
            println!("{line}");
        }
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(artifacts)
}

/// Options that pin down a two-body kernel.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct KernelArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: TrapArgs,
    /// Transverse states per particle. For a harmonic trap without --y-max the
    /// grid is sized to hold exactly this many states.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nc: Option<usize>,
    /// Total quasi-momentum K of the pair.
    #[arg(long = "total-k", allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_k: Option<f64>,
}

impl KernelArgs {
    pub fn resolve(&mut self) -> Result<(), CliError> {
        match self.trap.name()? {
            TrapName::Harmonic if self.trap.y_max.is_none() => {
                let nc = self.nc.ok_or_else(|| config_err("harmonic two-body runs need --nc or --y-max"))?;
                if nc < 3 || nc % 2 == 0 {
                    return Err(config_err(format!("--nc {nc} must be odd and at least 3 to fill a symmetric grid")));
                }
                self.trap.y_max = Some((nc - 1) / 2);
            }
            TrapName::DeltaWell => return Err(config_err("two-body runs need a trap with a discrete spectrum")),
            _ => {}
        }
        self.trap.resolve(10)?;
        self.total_k.get_or_insert(0.0);
        Ok(())
    }

    pub fn spectrum(&self) -> Result<TransverseSpectrum, CliError> {
        Ok(solve_transverse(&self.trap.spec()?)?)
    }

    /// Kernel at relative momentum `k`; `nc` defaults to the full grid.
    pub fn kernel(&self, k: f64) -> Result<(TransverseSpectrum, OverlapKernel), CliError> {
        let spectrum = self.spectrum()?;
        let nc = self.nc.unwrap_or(spectrum.len());
        let params = KernelParams { total_k: self.total_k.unwrap_or(0.0), k, ..KernelParams::new(nc) };
        let kernel = build_kernel(&spectrum, params)?;
        Ok((spectrum, kernel))
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), |v| format!("{v}"))
}
