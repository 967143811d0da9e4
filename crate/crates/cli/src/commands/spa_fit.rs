use std::path::PathBuf;

use clap::Args;
use quasi1d::spa::{linspace, spa_curve, spa_fit, SpaFit};
use quasi1d::twobody::{solve_scattering_length, SpectralKernel};
use serde::{Deserialize, Serialize};

use super::{fmt_opt, Command, Ctx, KernelArgs};
use crate::config::SweepArgs;
use crate::error::{config_err, CliError};
use crate::output::{Artifacts, Cell, Table};

/// Single-pole fit of U1D ≈ c1 + c2/U at strong attraction.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SpaFitArgs {
    /// CSV with `U_over_J` and `U1D_over_J` columns. Without it the curve is
    /// computed from the trap options.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub curve: Option<PathBuf>,
    /// Entrance overlap R0000, required with --curve.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0000: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Lower end of the fit window.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_from: Option<f64>,
    /// Upper end of the fit window.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_to: Option<f64>,
    /// Couplings sampled in the fit window when the curve is computed.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_points: Option<usize>,
    /// Range of the overlay comparing the fit with the exact curve.
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
}

fn read_curve(path: &std::path::Path) -> Result<Vec<(f64, f64)>, CliError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let headers = reader.headers()?.clone();
    let column = |name: &str, fallback: usize| headers.iter().position(|h| h == name).unwrap_or(fallback);
    let (cu, cv) = (column("U_over_J", 0), column("U1D_over_J", 1));
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record?;
        let (Some(u), Some(v)) = (record.get(cu), record.get(cv)) else {
            return Err(config_err(format!("{}: short row", path.display())));
        };
        // pole rows carry an empty coupling
        if v.is_empty() {
            continue;
        }
        let parse = |s: &str| s.parse::<f64>().map_err(|e| config_err(format!("{}: '{s}': {e}", path.display())));
        out.push((parse(u)?, parse(v)?));
    }
    Ok(out)
}

impl SpaFitArgs {
    fn computed(&self) -> bool {
        self.curve.is_none()
    }
}

fn fit_table(fit: &SpaFit, r0000: f64) -> Table {
    let mut table = Table::new(
        "spa_fit.csv",
        &["c1", "c2", "R0000", "UCIR_from_c1", "UCIR_from_c2", "UCIR_estimate", "spread", "max_residual", "fit_from", "fit_to", "points"],
    );
    table.push(vec![
        fit.c1.into(),
        fit.c2.into(),
        r0000.into(),
        fit.estimate_c1.into(),
        fit.estimate_c2.into(),
        fit.estimate().into(),
        fit.spread().into(),
        fit.residual.into(),
        fit.window.0.into(),
        fit.window.1.into(),
        fit.points.into(),
    ]);
    table
}

impl Command for SpaFitArgs {
    const NAME: &'static str = "spa-fit";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.fit_from.get_or_insert(-1000.0);
        self.fit_to.get_or_insert(-900.0);
        if self.computed() {
            self.kernel.resolve()?;
            self.fit_points.get_or_insert(50);
            self.sweep.resolve(-50.0, 20.0, 701);
        } else if self.r0000.is_none() {
            return Err(config_err("--curve needs --r0000"));
        }
        Ok(())
    }

    fn execute(&self, _ctx: &Ctx) -> Result<Artifacts, CliError> {
        let (lo, hi) = (self.fit_from.unwrap_or(-1000.0), self.fit_to.unwrap_or(-900.0));
        if !(lo < hi) {
            return Err(config_err(format!("fit window [{lo}, {hi}] is empty")));
        }
        let mut artifacts = Artifacts::default();
        if let Some(path) = &self.curve {
            let r0000 = self.r0000.unwrap_or_default();
            let points: Vec<_> = read_curve(path)?.into_iter().filter(|(u, _)| (lo..=hi).contains(u)).collect();
            let fit = spa_fit(&points, r0000, &[])?;
            artifacts.summary.push(format!("SPA estimate U_CIR/J = {} (from c1 {}, from c2 {})", fit.estimate(), fit.estimate_c1, fmt_opt(fit.estimate_c2)));
            artifacts.tables.push(fit_table(&fit, r0000));
            return Ok(artifacts);
        }

        let (_, kernel) = self.kernel.kernel(0.0)?;
        let poles: Vec<f64> = SpectralKernel::new(&kernel).poles().iter().map(|p| p.0).collect();
        let mut points = Vec::new();
        for u in linspace(lo, hi, self.fit_points.unwrap_or(50)) {
            points.push((u, solve_scattering_length(&kernel, u)?.u1d));
        }
        let fit = spa_fit(&points, kernel.r0000, &poles)?;
        artifacts.summary.push(format!("SPA estimate U_CIR/J = {} (from c1 {}, from c2 {})", fit.estimate(), fit.estimate_c1, fmt_opt(fit.estimate_c2)));
        artifacts.tables.push(fit_table(&fit, kernel.r0000));

        let grid = self.sweep.grid()?;
        let approx = spa_curve(&grid, kernel.r0000, fit.estimate())?;
        let mut overlay = Table::new("spa_overlay.csv", &["U_over_J", "U1D_over_J", "U1D_spa_over_J", "atan_U1D", "atan_U1D_spa"]);
        overlay.meta("UCIR_estimate", fit.estimate());
        for (u, spa) in approx {
            let exact = solve_scattering_length(&kernel, u).ok().map(|r| r.u1d);
            overlay.push(vec![
                u.into(),
                exact.into(),
                spa.into(),
                exact.map_or(Cell::Empty, |x| x.atan().into()),
                spa.map_or(Cell::Empty, |x| x.atan().into()),
            ]);
        }
        artifacts.tables.push(overlay);
        Ok(artifacts)
    }
}
