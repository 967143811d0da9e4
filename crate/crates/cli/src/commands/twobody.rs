use clap::{Args, ValueEnum};
use quasi1d::twobody::{born_series, locate_resonances, solve_finite_k, solve_scattering_length, SpectralKernel};
use quasi1d::Error;
use serde::{Deserialize, Serialize};

use super::resonances::{report_summary, report_table, window};
use super::{Command, Ctx, KernelArgs};
use crate::config::SweepArgs;
use crate::error::{config_err, CliError};
use crate::output::{Artifacts, Cell, Diagnostic, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Dense LU solve of the channel system.
    Direct,
    /// Eigen-decomposition of the kernel, one diagonalization per sweep.
    Spectral,
    /// Truncated Born series.
    Born,
}

/// Effective 1D coupling of a boson pair against the bare coupling.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct TwoBodyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    /// Relative quasi-momentum k.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<SolveMethod>,
    /// Born series order.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub born_order: Option<usize>,
    /// Also locate the resonances inside the sweep range.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resonances: Option<bool>,
}

impl Command for TwoBodyArgs {
    const NAME: &'static str = "twobody";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.kernel.resolve()?;
        self.sweep.resolve(-50.0, 20.0, 700);
        let k = *self.k.get_or_insert(0.0);
        let method = *self.method.get_or_insert(SolveMethod::Direct);
        if k != 0.0 && method != SolveMethod::Direct {
            return Err(config_err("finite-k runs only support --method direct"));
        }
        if method == SolveMethod::Born {
            self.born_order.get_or_insert(100);
        }
        self.resonances.get_or_insert(false);
        Ok(())
    }

    fn execute(&self, ctx: &Ctx) -> Result<Artifacts, CliError> {
        let grid = self.sweep.grid()?;
        let k = self.k.unwrap_or(0.0);
        let (spectrum, kernel) = self.kernel.kernel(k)?;
        let nc = self.kernel.nc.unwrap_or(spectrum.len());
        let total_k = kernel.params.total_k;
        let spectral = (self.method == Some(SolveMethod::Spectral)).then(|| SpectralKernel::new(&kernel));
        let results = ctx.map(&grid, |&u| match self.method.unwrap_or(SolveMethod::Direct) {
            _ if k != 0.0 => solve_finite_k(&kernel, u),
            SolveMethod::Direct => solve_scattering_length(&kernel, u),
            SolveMethod::Spectral => spectral.as_ref().expect("built above").solve(u),
            SolveMethod::Born => born_series(&kernel, u, self.born_order.unwrap_or(100)),
        });

        let mut table = Table::new(
            "twobody.csv",
            &["U_over_J", "U1D_over_J", "atan_U1D", "method", "Nc", "K", "a_over_d", "delta_k", "status"],
        );
        table.meta("R0000", kernel.r0000);
        table.meta("J_K", kernel.j_k);
        table.meta("channels", kernel.len());
        table.meta("k", k);
        let mut diagnostics = Vec::new();
        for (&u, result) in grid.iter().zip(results) {
            let failed = |status: &str, table: &mut Table| {
                table.push(vec![u.into(), Cell::Empty, Cell::Empty, Cell::Empty, nc.into(), total_k.into(), Cell::Empty, Cell::Empty, status.into()]);
            };
            match result {
                Ok(r) => table.push(vec![
                    u.into(),
                    r.u1d.into(),
                    r.u1d.atan().into(),
                    r.method.label().into(),
                    nc.into(),
                    total_k.into(),
                    r.a.into(),
                    r.delta_k.into(),
                    "ok".into(),
                ]),
                Err(e @ (Error::SingularSystem { .. } | Error::Diverging { .. })) => {
                    let status = if matches!(e, Error::SingularSystem { .. }) { "pole" } else { "diverging" };
                    failed(status, &mut table);
                    diagnostics.push(Diagnostic { point: format!("U={u}"), status: status.into(), detail: e.to_string() });
                }
                Err(e) => return Err(e.into()),
            }
        }
        let mut artifacts = Artifacts { tables: vec![table], diagnostics, summary: Vec::new() };
        artifacts.summary.push(format!("{} couplings, {} closed channels, R0000 = {}", grid.len(), kernel.len(), kernel.r0000));
        if self.resonances == Some(true) {
            let (lo, hi) = (grid[0], grid[grid.len() - 1]);
            let report = locate_resonances(&kernel, window(Some(lo), Some(hi))?)?;
            artifacts.tables.push(report_table(&report, "twobody_resonances.csv"));
            artifacts.summary.extend(report_summary(&report));
        }
        Ok(artifacts)
    }
}
