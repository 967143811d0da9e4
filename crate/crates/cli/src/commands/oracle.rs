use clap::{Args, ValueEnum};
use quasi1d::oracle::{pair_scattering_length, strip_scattering_length, StripProblem};
use quasi1d::twobody::{build_kernel, solve_scattering_length, KernelParams};
use quasi1d::{effective_u1d, solve_transverse};
use serde::{Deserialize, Serialize};

use super::{fmt_opt, Command, Ctx};
use crate::config::{TrapArgs, TrapName};
use crate::error::{config_err, CliError};
use crate::output::{Artifacts, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMode {
    Single,
    Pair,
}

/// Brute-force strip solve compared with the channel method.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct OracleArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub trap: TrapArgs,
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<OracleMode>,
    /// Bare coupling U/J.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    /// Strip sites on each side of the impurity.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lx: Option<usize>,
    /// Total quasi-momentum K of the pair.
    #[arg(long = "total-k", allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub total_k: Option<f64>,
}

impl Command for OracleArgs {
    const NAME: &'static str = "oracle";

    fn resolve(&mut self) -> Result<(), CliError> {
        if self.trap.name()? == TrapName::DeltaWell {
            return Err(config_err("the strip oracle needs a trap with a discrete spectrum"));
        }
        self.trap.resolve(10)?;
        self.mode.get_or_insert(OracleMode::Single);
        self.u.get_or_insert(-2.0);
        self.lx.get_or_insert(200);
        self.total_k.get_or_insert(0.0);
        Ok(())
    }

    fn execute(&self, _ctx: &Ctx) -> Result<Artifacts, CliError> {
        let spec = self.trap.spec()?;
        let u = self.u.unwrap_or(-2.0);
        let problem = StripProblem { lx: self.lx.unwrap_or(200), spec: spec.clone(), u };
        let spectrum = solve_transverse(&spec)?;
        let mode = self.mode.unwrap_or(OracleMode::Single);
        let (oracle, channel) = match mode {
            OracleMode::Single => (strip_scattering_length(&problem)?, effective_u1d(&spectrum, u, 0.0)?.a),
            OracleMode::Pair => {
                let total_k = self.total_k.unwrap_or(0.0);
                let params = KernelParams { total_k, ..KernelParams::new(spectrum.len()) };
                let kernel = build_kernel(&spectrum, params)?;
                (pair_scattering_length(&problem, total_k)?, solve_scattering_length(&kernel, u)?.a)
            }
        };
        let difference = channel.map(|a| ((oracle.a - a) / a).abs());
        let mut table = Table::new(
            "oracle.csv",
            &["mode", "Lx", "U_over_J", "a_oracle", "a_channel", "relative_difference", "closed_weight", "fit_from", "fit_to"],
        );
        table.push(vec![
            if mode == OracleMode::Single { "single" } else { "pair" }.into(),
            problem.lx.into(),
            u.into(),
            oracle.a.into(),
            channel.into(),
            difference.into(),
            oracle.closed_weight.into(),
            oracle.fit_window.0.into(),
            oracle.fit_window.1.into(),
        ]);
        let summary = vec![format!("a/d: oracle {}, channel method {}, relative difference {}", oracle.a, fmt_opt(channel), fmt_opt(difference))];
        Ok(Artifacts { tables: vec![table], summary, ..Default::default() })
    }
}
