use std::path::Path;

use clap::Args;

use super::continuum::ContinuumArgs;
use super::ring::RingArgs;
use super::single::SingleArgs;
use super::spa_fit::SpaFitArgs;
use super::twobody::TwoBodyArgs;
use super::{run_command, Ctx, KernelArgs};
use crate::config::{SweepArgs, TrapArgs, TrapName};
use crate::error::CliError;

pub const FIGURES: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig-two-site"];

/// Regenerates the data behind one of the canned figures.
#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// One of fig1, fig2, fig3, fig4, fig5, fig-two-site.
    pub name: String,
}

fn harmonic(omega: f64, y_max: Option<usize>) -> TrapArgs {
    TrapArgs { trap: Some(TrapName::Harmonic), omega: Some(omega), y_max, ..Default::default() }
}

fn sweep(from: f64, to: f64, points: usize) -> SweepArgs {
    SweepArgs { u_from: Some(from), u_to: Some(to), points: Some(points) }
}

fn pair(trap: TrapArgs, nc: Option<usize>, range: SweepArgs) -> TwoBodyArgs {
    TwoBodyArgs {
        kernel: KernelArgs { trap, nc, total_k: Some(0.0) },
        sweep: range,
        resonances: Some(true),
        ..Default::default()
    }
}

fn spa(kernel: KernelArgs, range: SweepArgs) -> SpaFitArgs {
    SpaFitArgs { kernel, sweep: range, ..Default::default() }
}

/// Writes every run of figure `name` into `out/<name>/`.
pub fn run_figure(name: &str, ctx: &Ctx, out: &Path) -> Result<(), CliError> {
    let dir = out.join(name);
    match name {
        "fig1" => {
            let args = SingleArgs { trap: harmonic(1e-3, Some(200)), sweep: sweep(-30.0, 30.0, 600), ..Default::default() };
            run_command(&args, None, ctx, &dir, "single")?;
        }
        "fig2" => {
            for (stem, lo, hi, points) in [("continuum", 0.1, 20.0, 200), ("continuum_inset", 0.1, 2.0, 100)] {
                let args = ContinuumArgs {
                    v0_from: Some(lo),
                    v0_to: Some(hi),
                    points: Some(points),
                    file: Some(format!("{stem}.csv")),
                    ..Default::default()
                };
                run_command(&args, None, ctx, &dir, stem)?;
            }
        }
        "fig3" => {
            let args = RingArgs {
                trap: harmonic(1e-3, Some(200)),
                sweep: sweep(-30.0, 30.0, 121),
                l: Some(vec![10, 50, 1000]),
                max_branches: None,
            };
            run_command(&args, None, ctx, &dir, "ring")?;
        }
        "fig4" | "fig5" => {
            let (omega, nc, range) = if name == "fig4" { (1e-3, 41, sweep(-10.0, 5.0, 600)) } else { (0.1, 21, sweep(-12.0, 2.0, 600)) };
            let two_body = pair(harmonic(omega, None), Some(nc), range.clone());
            run_command(&two_body, None, ctx, &dir, "twobody")?;
            run_command(&spa(two_body.kernel, range), None, ctx, &dir, "spa_fit")?;
        }
        "fig-two-site" => {
            let trap = TrapArgs { trap: Some(TrapName::TwoSite), v: Some(1.0), ..Default::default() };
            let two_body = pair(trap, None, sweep(-50.0, 20.0, 700));
            run_command(&two_body, None, ctx, &dir, "twobody")?;
            run_command(&spa(two_body.kernel, sweep(-50.0, 20.0, 701)), None, ctx, &dir, "spa_fit")?;
        }
        _ => return Err(CliError::UnknownFigure(name.to_string())),
    }
    Ok(())
}
