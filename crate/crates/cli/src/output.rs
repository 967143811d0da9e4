//! CSV tables with a `#` metadata block, and the run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A CSV cell. Missing values (poles, absent phase shifts) are empty.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) if *x == 0.0 || (1e-4..1e15).contains(&x.abs()) => format!("{x}"),
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// Non-fatal per-point outcome worth recording in the manifest.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub point: String,
    pub status: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub file: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra `# key: value` lines after the standard header.
    pub metadata: Vec<(String, String)>,
}

impl Table {
    pub fn new(file: impl Into<String>, columns: &[&'static str]) -> Self {
        Self { file: file.into(), columns: columns.to_vec(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.metadata.push((key.to_string(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    fn render(&self, command: &str, config_hash: &str) -> Result<String, CliError> {
        let mut out = String::new();
        let _ = writeln!(out, "# tool: quasi1d {VERSION}");
        let _ = writeln!(out, "# command: {command}");
        let _ = writeln!(out, "# config_sha256: {config_hash}");
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        let body = writer.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
        Ok(out)
    }
}

/// Everything a command produced.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub tables: Vec<Table>,
    pub diagnostics: Vec<Diagnostic>,
    /// Human-readable lines for stdout.
    pub summary: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Writes every table, the resolved config and the manifest into `dir`.
/// Returns the written paths.
pub fn write_run(dir: &Path, stem: &str, command: &str, config: &toml::Table, artifacts: &Artifacts) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir)?;
    let mut with_command = toml::Table::new();
    with_command.insert("command".into(), toml::Value::String(command.into()));
    with_command.extend(config.clone());
    let config_text = toml::to_string(&with_command).map_err(|e| CliError::Io(e.to_string()))?;
    let config_hash = sha256_hex(config_text.as_bytes());

    let mut written = Vec::new();
    let mut outputs = Vec::new();
    for table in &artifacts.tables {
        let text = table.render(command, &config_hash)?;
        let path = dir.join(&table.file);
        std::fs::write(&path, &text)?;
        outputs.push(json!({ "file": table.file, "rows": table.rows.len(), "sha256": sha256_hex(text.as_bytes()) }));
        written.push(path);
    }
    let config_path = dir.join(format!("{stem}.config.toml"));
    std::fs::write(&config_path, &config_text)?;
    written.push(config_path);

    let manifest = json!({
        "tool": "quasi1d",
        "version": VERSION,
        "command": command,
        "config": config,
        "config_sha256": config_hash,
        "config_file": format!("{stem}.config.toml"),
        "outputs": outputs,
        "diagnostics": artifacts.diagnostics,
    });
    let manifest_path = dir.join(format!("{stem}.manifest.json"));
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&manifest_path, text + "\n")?;
    written.push(manifest_path);
    Ok(written)
}
