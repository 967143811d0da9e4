use clap::Args;
use quasi1d::continuum::{u_cir_with_continuum, Well};
use quasi1d::lattice::{TrapKind, EDGE_TOL};
use quasi1d::TrapSpec;
use serde::{Deserialize, Serialize};

use super::{fmt_opt, Command, Ctx};
use crate::config::grid;
use crate::error::CliError;
use crate::output::{Artifacts, Table};

/// Resonance position of the delta well against its depth, continuum included.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct ContinuumArgs {
    /// Smallest well depth V0/J.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0_from: Option<f64>,
    /// Largest well depth V0/J.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0_to: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    /// Longitudinal quasi-momentum k.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Output file name.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
}

struct Row {
    v0: f64,
    u_cir: Option<f64>,
    s: f64,
    error: f64,
    crosscheck: f64,
    sharp: usize,
}

fn evaluate(v0: f64, k: f64) -> Result<Row, CliError> {
    let y_max = TrapSpec::auto_y_max(TrapKind::DeltaWell { v0 }, 1, EDGE_TOL)?;
    let well = Well::from_spec(&TrapSpec::delta_well(v0, y_max))?;
    let bound = well.bound_states(y_max)?;
    let cir = u_cir_with_continuum(&bound, &well, k)?;
    Ok(Row {
        v0,
        u_cir: cir.u_cir(),
        s: cir.continuum.value,
        error: cir.continuum.quadrature_error,
        crosscheck: cir.continuum.crosscheck,
        sharp: cir.continuum.sharp_resonances.len(),
    })
}

impl Command for ContinuumArgs {
    const NAME: &'static str = "continuum";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.v0_from.get_or_insert(0.1);
        self.v0_to.get_or_insert(20.0);
        self.points.get_or_insert(200);
        self.k.get_or_insert(0.0);
        self.file.get_or_insert_with(|| "continuum.csv".into());
        Ok(())
    }

    fn execute(&self, ctx: &Ctx) -> Result<Artifacts, CliError> {
        let depths = grid(self.v0_from, self.v0_to, self.points, "v0")?;
        let k = self.k.unwrap_or(0.0);
        let rows = ctx.map(&depths, |&v0| evaluate(v0, k));
        let mut table = Table::new(
            self.file.clone().unwrap_or_default(),
            &["V0_over_J", "UCIR_over_J", "S_times_J", "quadrature_error", "trapezoid_S_times_J", "sharp_resonances"],
        );
        table.meta("k", k);
        let mut last = None;
        for row in rows {
            let row = row?;
            last = Some((row.v0, row.u_cir));
            table.push(vec![row.v0.into(), row.u_cir.into(), row.s.into(), row.error.into(), row.crosscheck.into(), row.sharp.into()]);
        }
        let summary = last
            .map(|(v0, u)| vec![format!("{} depths, U_CIR/J = {} at V0/J = {v0}", depths.len(), fmt_opt(u))])
            .unwrap_or_default();
        Ok(Artifacts { tables: vec![table], summary, ..Default::default() })
    }
}
