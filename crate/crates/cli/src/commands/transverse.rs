use clap::Args;
use quasi1d::{solve_transverse, Parity};
use serde::{Deserialize, Serialize};

use super::{Command, Ctx};
use crate::config::TrapArgs;
use crate::error::CliError;
use crate::output::{Artifacts, Table};

/// Transverse eigenstates of the trap.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct TransverseArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: TrapArgs,
    /// Only list the lowest states.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub states: Option<usize>,
}

impl Command for TransverseArgs {
    const NAME: &'static str = "transverse";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.trap.resolve(200)
    }

    fn execute(&self, _ctx: &Ctx) -> Result<Artifacts, CliError> {
        let spectrum = solve_transverse(&self.trap.spec()?)?;
        let n = self.states.unwrap_or(spectrum.len()).min(spectrum.len());
        let mut table = Table::new("transverse.csv", &["n", "energy_over_J", "psi_origin", "parity", "edge_amplitude"]);
        table.meta("sites", spectrum.sites().len());
        table.meta("orthonormality_defect", spectrum.orthonormality_defect());
        for i in 0..n {
            let parity = match spectrum.parity(i) {
                Some(Parity::Even) => "even",
                Some(Parity::Odd) => "odd",
                None => "",
            };
            table.push(vec![
                i.into(),
                spectrum.energy(i).into(),
                spectrum.origin_amplitude(i).into(),
                parity.into(),
                spectrum.edge_amplitude(i).into(),
            ]);
        }
        let summary = vec![format!("{} states, E0/J = {}", spectrum.len(), spectrum.ground_energy())];
        Ok(Artifacts { tables: vec![table], summary, ..Default::default() })
    }
}
