use clap::Args;
use quasi1d::ring::{ring_cir_crossings, ring_spectrum, RingSolution};
use quasi1d::solve_transverse;
use serde::{Deserialize, Serialize};

use super::{Command, Ctx};
use crate::config::{SweepArgs, TrapArgs};
use crate::error::{config_err, CliError};
use crate::output::{Artifacts, Table};

/// Single-particle levels on a ring of L sites against the bare coupling.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct RingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: TrapArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub sweep: SweepArgs,
    /// Ring lengths, comma separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l: Option<Vec<usize>>,
    /// Keep only the lowest branches.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_branches: Option<usize>,
}

impl Command for RingArgs {
    const NAME: &'static str = "ring";

    fn resolve(&mut self) -> Result<(), CliError> {
        self.trap.resolve(200)?;
        self.sweep.resolve(-30.0, 30.0, 121);
        let lengths = self.l.get_or_insert_with(|| vec![10, 50]);
        if lengths.is_empty() {
            return Err(config_err("--l needs at least one ring length"));
        }
        Ok(())
    }

    fn execute(&self, ctx: &Ctx) -> Result<Artifacts, CliError> {
        let grid = self.sweep.grid()?;
        let spectrum = solve_transverse(&self.trap.spec()?)?;
        let (lo, hi) = (grid[0], grid[grid.len() - 1]);
        let mut artifacts = Artifacts::default();
        for &l in self.l.as_deref().unwrap_or_default() {
            let levels = ctx.map(&grid, |&u| ring_spectrum(&spectrum, u, l));
            let mut table = Table::new(format!("ring_L{l}.csv"), &["U_over_J", "branch", "k", "energy_over_J", "residual"]);
            table.meta("L", l);
            let crossings = if lo < hi { ring_cir_crossings(&spectrum, l, lo, hi)? } else { Vec::new() };
            let listed: Vec<String> = crossings.iter().map(|u| u.to_string()).collect();
            table.meta("fermionized_crossings_U_over_J", listed.join(" "));
            for level in levels {
                for RingSolution { u, branch, k, energy, residual, .. } in level? {
                    if self.max_branches.is_some_and(|m| branch >= m) {
                        continue;
                    }
                    table.push(vec![u.into(), branch.into(), k.into(), energy.into(), residual.into()]);
                }
            }
            artifacts.summary.push(format!("L = {l}: {} levels, {} fermionized crossings in range", table.rows.len(), crossings.len()));
            artifacts.tables.push(table);
        }
        Ok(artifacts)
    }
}
