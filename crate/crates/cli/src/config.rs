//! Flag/config-file merging and the shared trap and sweep options.
//!
//! Every subcommand's options double as its config-file schema: keys are the
//! long flag names with `-` replaced by `_`. The file is read first and any
//! flag given on the command line replaces the file value.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use quasi1d::lattice::TrapKind;
use quasi1d::TrapSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrapName {
    Harmonic,
    DeltaWell,
    TwoSite,
    Tabulated,
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct TrapArgs {
    /// Transverse trap.
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trap: Option<TrapName>,
    /// Harmonic strength Ω in V(y) = Ω y².
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    /// Delta-well depth V₀ (V = V₀ off the centre site).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    /// Two-site step V (V(1) = 2V).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    /// Grid half-width.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_max: Option<usize>,
    /// CSV file with columns `y,V` for a tabulated trap.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<PathBuf>,
    /// Potential outside the tabulated sites (defaults to the largest entry).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outside: Option<f64>,
}

fn need<T: Copy>(value: Option<T>, what: &str, trap: &str) -> Result<T, CliError> {
    value.ok_or_else(|| config_err(format!("{trap} trap needs --{what}")))
}

impl TrapArgs {
    pub fn name(&self) -> Result<TrapName, CliError> {
        self.trap.ok_or_else(|| config_err("missing --trap"))
    }

    /// Fills the grid size for traps that need one.
    pub fn resolve(&mut self, default_y_max: usize) -> Result<(), CliError> {
        match self.name()? {
            TrapName::Harmonic => {
                need(self.omega, "omega", "harmonic")?;
                self.y_max.get_or_insert(default_y_max);
            }
            TrapName::DeltaWell => {
                need(self.v0, "v0", "delta-well")?;
                self.y_max.get_or_insert(default_y_max);
            }
            TrapName::TwoSite => {
                self.v.get_or_insert(1.0);
            }
            TrapName::Tabulated => {
                if self.table.is_none() {
                    return Err(config_err("tabulated trap needs --table"));
                }
                self.y_max.get_or_insert(default_y_max);
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<TrapSpec, CliError> {
        let y_max = self.y_max.unwrap_or(0);
        let spec = match self.name()? {
            TrapName::Harmonic => TrapSpec::harmonic(need(self.omega, "omega", "harmonic")?, y_max),
            TrapName::DeltaWell => TrapSpec::delta_well(need(self.v0, "v0", "delta-well")?, y_max),
            TrapName::TwoSite => TrapSpec::two_site(self.v.unwrap_or(1.0)),
            TrapName::Tabulated => {
                let path = self.table.as_deref().ok_or_else(|| config_err("tabulated trap needs --table"))?;
                let values = read_table(path)?;
                let outside = self.outside.unwrap_or_else(|| values.values().copied().fold(f64::NEG_INFINITY, f64::max));
                TrapSpec::new(TrapKind::Tabulated { values, outside }, y_max)
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn read_table(path: &Path) -> Result<BTreeMap<i64, f64>, CliError> {
    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_path(path)?;
    let mut values = BTreeMap::new();
    for record in reader.deserialize::<(i64, f64)>() {
        let (y, v) = record?;
        values.insert(y, v);
    }
    if values.is_empty() {
        return Err(config_err(format!("{} holds no (y, V) rows", path.display())));
    }
    Ok(values)
}

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    /// First coupling U/J of the sweep.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_from: Option<f64>,
    /// Last coupling U/J of the sweep.
    #[arg(long, allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u_to: Option<f64>,
    /// Number of equidistant couplings.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl SweepArgs {
    pub fn resolve(&mut self, from: f64, to: f64, points: usize) {
        self.u_from.get_or_insert(from);
        self.u_to.get_or_insert(to);
        self.points.get_or_insert(points);
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        grid(self.u_from, self.u_to, self.points, "u")
    }
}

pub fn grid(from: Option<f64>, to: Option<f64>, points: Option<usize>, name: &str) -> Result<Vec<f64>, CliError> {
    let (Some(a), Some(b), Some(n)) = (from, to, points) else {
        return Err(config_err(format!("sweep needs --{name}-from, --{name}-to and --points")));
    };
    if n == 0 {
        return Err(config_err("empty sweep grid (points = 0)"));
    }
    if !a.is_finite() || !b.is_finite() || a > b {
        return Err(config_err(format!("sweep range [{a}, {b}] is invalid")));
    }
    if n > 1 && a == b {
        return Err(config_err(format!("sweep range [{a}, {b}] is empty")));
    }
    Ok(quasi1d::spa::linspace(a, b, n))
}

/// Merges `file` under `flags` and deserializes the result, rejecting keys
/// the subcommand does not know.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&toml::Table>) -> Result<T, CliError> {
    let mut table = file.cloned().unwrap_or_default();
    let given = toml::Table::try_from(flags).map_err(|e| config_err(e.to_string()))?;
    for (k, v) in given {
        table.insert(k, v);
    }
    let merged: T = table.clone().try_into().map_err(|e: toml::de::Error| config_err(e.message().to_string()))?;
    let known = toml::Table::try_from(&merged).map_err(|e| config_err(e.to_string()))?;
    if let Some(unknown) = table.keys().find(|k| !known.contains_key(*k)) {
        return Err(config_err(format!("unknown config key '{unknown}'")));
    }
    Ok(merged)
}

pub fn read_config(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_err(format!("{}: {}", path.display(), e.message())))?;
    // a manifest-style config may carry its subcommand name
    let mut table = table;
    table.remove("command");
    Ok(table)
}
