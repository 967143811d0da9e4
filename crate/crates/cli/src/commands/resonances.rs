use clap::Args;
use quasi1d::twobody::{locate_resonances, ResonanceClass, ResonanceReport};
use serde::{Deserialize, Serialize};

use super::{Command, Ctx, KernelArgs};
use crate::error::{config_err, CliError};
use crate::output::{Artifacts, Cell, Table};

/// Confinement-induced resonances and zero crossings of the pair coupling.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ResonancesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Lower end of the coupling window.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_from: Option<f64>,
    /// Upper end of the coupling window.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_to: Option<f64>,
}

fn class_name(class: ResonanceClass) -> &'static str {
    match class {
        ResonanceClass::Broad => "broad",
        ResonanceClass::Narrow => "narrow",
        ResonanceClass::Suppressed => "suppressed",
    }
}

pub fn window(from: Option<f64>, to: Option<f64>) -> Result<(f64, f64), CliError> {
    let (lo, hi) = (from.unwrap_or(-50.0), to.unwrap_or(20.0));
    if !(lo < hi) {
        return Err(config_err(format!("resonance window [{lo}, {hi}] is empty")));
    }
    Ok((lo, hi))
}

pub fn report_table(report: &ResonanceReport, file: &str) -> Table {
    let mut table = Table::new(file, &["kind", "U_over_J", "residue", "relative_weight", "class"]);
    table.meta("window", format!("{} {}", report.window.0, report.window.1));
    table.meta("method", &report.method);
    for r in &report.resonances {
        table.push(vec!["pole".into(), r.u_cir.into(), r.residue.into(), r.relative_weight.into(), class_name(r.class).into()]);
    }
    for &u in &report.zero_crossings {
        table.push(vec!["zero".into(), u.into(), Cell::Empty, Cell::Empty, Cell::Empty]);
    }
    table
}

pub fn report_summary(report: &ResonanceReport) -> Vec<String> {
    let mut lines: Vec<String> = report
        .cirs()
        .map(|r| format!("CIR at U/J = {:.6} ({}, relative weight {:.3e})", r.u_cir, class_name(r.class), r.relative_weight))
        .collect();
    lines.push(format!(
        "{} suppressed poles, {} zero crossings",
        report.count(ResonanceClass::Suppressed),
        report.zero_crossings.len()
    ));
    lines
}

impl Command for ResonancesArgs {
    const NAME: &'static str = "resonances";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.kernel.resolve()?;
        let (lo, hi) = window(self.window_from, self.window_to)?;
        self.window_from = Some(lo);
        self.window_to = Some(hi);
        Ok(())
    }

    fn execute(&self, _ctx: &Ctx) -> Result<Artifacts, CliError> {
        let (_, kernel) = self.kernel.kernel(0.0)?;
        let report = locate_resonances(&kernel, window(self.window_from, self.window_to)?)?;
        let mut table = report_table(&report, "resonances.csv");
        table.meta("channels", kernel.len());
        Ok(Artifacts { tables: vec![table], summary: report_summary(&report), ..Default::default() })
    }
}
