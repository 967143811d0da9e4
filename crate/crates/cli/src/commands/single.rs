use clap::Args;
use quasi1d::continuum::{u_cir_with_continuum, Well};
use quasi1d::lattice::{TrapKind, EDGE_TOL};
use quasi1d::single::effective_u1d_with;
use quasi1d::{solve_transverse, u_cir, ChannelCutoff, CirValue, Error, TrapSpec, TransverseSpectrum};
use serde::{Deserialize, Serialize};

use super::{fmt_opt, Command, Ctx};
use crate::config::{SweepArgs, TrapArgs, TrapName};
use crate::error::{config_err, CliError};
use crate::output::{Artifacts, Cell, Diagnostic, Table};

/// Effective 1D coupling of one particle against the bare coupling.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SingleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: TrapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    /// Longitudinal quasi-momentum k.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Closed channels kept in the resonance sum (default: all).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cut: Option<usize>,
}

/// Resonance sum and the spectrum it belongs to. Wells with a transverse
/// continuum keep their bound states and fold the continuum into the sum.
pub fn resonance_sum(trap: &TrapArgs, k: f64, n_cut: Option<usize>) -> Result<(TransverseSpectrum, CirValue), CliError> {
    let spec = trap.spec()?;
    match trap.name()? {
        TrapName::DeltaWell | TrapName::Tabulated => {
            if n_cut.is_some() {
                return Err(config_err("--n-cut applies to traps without a continuum"));
            }
            let well = Well::from_spec(&spec)?;
            let bound = well.bound_states(spec.y_max)?;
            let with_continuum = u_cir_with_continuum(&bound, &well, k)?;
            let bound_sum = u_cir(&bound, k, ChannelCutoff::All)?;
            Ok((bound, with_continuum.as_cir_value(&bound_sum)))
        }
        _ => {
            let spectrum = solve_transverse(&spec)?;
            let cutoff = n_cut.map_or(ChannelCutoff::All, ChannelCutoff::Fixed);
            let cir = u_cir(&spectrum, k, cutoff)?;
            Ok((spectrum, cir))
        }
    }
}

impl Command for SingleArgs {
    const NAME: &'static str = "single";

    fn resolve(&mut self) -> Result<(), CliError> {
        if let (Some(TrapName::DeltaWell), None, Some(v0)) = (self.trap.trap, self.trap.y_max, self.trap.v0) {
            self.trap.y_max = Some(TrapSpec::auto_y_max(TrapKind::DeltaWell { v0 }, 1, EDGE_TOL)?);
        }
        self.trap.resolve(200)?;
        self.sweep.resolve(-30.0, 30.0, 600);
        self.k.get_or_insert(0.0);
        Ok(())
    }

    fn execute(&self, ctx: &Ctx) -> Result<Artifacts, CliError> {
        let grid = self.sweep.grid()?;
        let (spectrum, cir) = resonance_sum(&self.trap, self.k.unwrap_or(0.0), self.n_cut)?;
        let results = ctx.map(&grid, |&u| effective_u1d_with(&spectrum, &cir, u));

        let mut table = Table::new("single.csv", &["U_over_J", "U1D_over_J", "atan_U1D", "a_over_d", "delta_k", "status"]);
        table.meta("U_CIR_over_J", fmt_opt(cir.u_cir()));
        table.meta("k", cir.k);
        table.meta("closed_channels", cir.n_cut);
        table.meta("tail", cir.tail);
        let mut diagnostics = Vec::new();
        for (&u, result) in grid.iter().zip(results) {
            match result {
                Ok(r) => table.push(vec![
                    u.into(),
                    r.u1d.into(),
                    r.u1d.atan().into(),
                    r.a.into(),
                    r.delta_k.into(),
                    "ok".into(),
                ]),
                Err(Error::AtResonance { .. }) => {
                    table.push(vec![u.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty, "pole".into()]);
                    diagnostics.push(Diagnostic { point: format!("U={u}"), status: "pole".into(), detail: "coupling sits on the resonance".into() });
                }
                Err(e) => return Err(e.into()),
            }
        }
        let summary = vec![format!("U_CIR/J = {}", fmt_opt(cir.u_cir()))];
        Ok(Artifacts { tables: vec![table], diagnostics, summary })
    }
}
