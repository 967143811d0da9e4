use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn quasi1d(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasi1d"))
        .arg("--out")
        .arg(dir)
        .arg("--quiet")
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) {
    let out = quasi1d(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn error_record(out: &Output) -> Value {
    let line = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(line.trim()).unwrap_or_else(|e| panic!("not a JSON record ({e}): {line}"))
}

/// Data rows of a CSV, header included, without the `#` block.
fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(table: &[Vec<String>], name: &str) -> Vec<String> {
    let i = table[0].iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    table[1..].iter().map(|r| r[i].clone()).collect()
}

#[test]
fn empty_grid_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = quasi1d(dir.path(), &["single", "--trap", "harmonic", "--omega", "1e-3", "--points", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "ConfigError");
}

#[test]
fn reversed_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = quasi1d(dir.path(), &["single", "--trap", "harmonic", "--omega", "1e-3", "--u-from", "5", "--u-to", "-5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_harmonic_sweep() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["single", "--trap", "harmonic", "--omega", "1e-3", "--u-from", "-30", "--u-to", "30", "--points", "600"]);
    let table = rows(&dir.path().join("single.csv"));
    assert_eq!(table.len(), 601);
    let u: Vec<f64> = column(&table, "U_over_J").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(u[0], -30.0);
    assert_eq!(u[599], 30.0);
    for (atan, u1d) in column(&table, "atan_U1D").iter().zip(column(&table, "U1D_over_J")) {
        let (a, v): (f64, f64) = (atan.parse().unwrap(), u1d.parse().unwrap());
        assert!((a - v.atan()).abs() < 1e-15);
    }
    let text = std::fs::read_to_string(dir.path().join("single.csv")).unwrap();
    assert!(text.lines().any(|l| l.starts_with("# U_CIR_over_J: -2.76")));
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("single.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["omega"], 1e-3);
    assert_eq!(manifest["outputs"][0]["rows"], 600);
}

#[test]
fn two_site_pair_with_resonances() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["twobody", "--trap", "two-site", "--v", "1.0", "--resonances"]);
    let table = rows(&dir.path().join("twobody_resonances.csv"));
    let kinds = column(&table, "kind");
    assert_eq!(kinds.iter().filter(|k| *k == "pole").count(), 2);
    assert_eq!(kinds.iter().filter(|k| *k == "zero").count(), 1);
    let classes = column(&table, "class");
    assert!(classes.contains(&"broad".to_string()) && classes.contains(&"narrow".to_string()));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "trap = \"harmonic\"\nomega = 0.5\ny_max = 20\nu_from = -3.0\nu_to = 3.0\npoints = 7\n").unwrap();
    ok(dir.path(), &["--config", config.to_str().unwrap(), "single", "--omega", "0.1", "--points", "5"]);
    let resolved = std::fs::read_to_string(dir.path().join("single.config.toml")).unwrap();
    assert!(resolved.contains("omega = 0.1"), "{resolved}");
    assert!(resolved.contains("points = 5"));
    assert!(resolved.contains("y_max = 20"));
    assert_eq!(rows(&dir.path().join("single.csv")).len(), 6);
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "trap = \"harmonic\"\nomega = 0.1\nomgea = 0.2\n").unwrap();
    let out = quasi1d(dir.path(), &["--config", config.to_str().unwrap(), "single"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_record(&out)["message"].as_str().unwrap().contains("omgea"));
}

#[test]
fn rerun_from_resolved_config_is_bit_identical() {
    let first = tempfile::tempdir().unwrap();
    ok(first.path(), &["twobody", "--trap", "harmonic", "--omega", "0.1", "--nc", "11", "--points", "40"]);
    let config = first.path().join("twobody.config.toml");
    let second = tempfile::tempdir().unwrap();
    ok(second.path(), &["--config", config.to_str().unwrap(), "twobody"]);
    let a = std::fs::read(first.path().join("twobody.csv")).unwrap();
    let b = std::fs::read(second.path().join("twobody.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn output_does_not_depend_on_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["twobody", "--trap", "harmonic", "--omega", "0.1", "--nc", "11", "--points", "64"];
    ok(a.path(), &[&["--threads", "1"], &args[..]].concat());
    ok(b.path(), &[&["--threads", "4"], &args[..]].concat());
    assert_eq!(std::fs::read(a.path().join("twobody.csv")).unwrap(), std::fs::read(b.path().join("twobody.csv")).unwrap());
}

#[test]
fn unknown_figure_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = quasi1d(dir.path(), &["figure", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "UnknownFigure");
}

#[test]
fn oracle_needs_validate() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["oracle", "--trap", "harmonic", "--omega", "0.1", "--y-max", "6", "--u", "-2"];
    assert_eq!(quasi1d(dir.path(), &args).status.code(), Some(2));
    ok(dir.path(), &[&["--validate"], &args[..]].concat());
    let table = rows(&dir.path().join("oracle.csv"));
    let diff: f64 = column(&table, "relative_difference")[0].parse().unwrap();
    assert!(diff < 1e-6, "{diff}");
}

#[test]
fn open_channel_maps_to_physical_regime_code() {
    let dir = tempfile::tempdir().unwrap();
    // k = 1.5 puts the two-site pair above the first closed threshold
    let out = quasi1d(dir.path(), &["twobody", "--trap", "two-site", "--k", "1.5", "--points", "3"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn spa_fit_reads_a_stored_curve() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["twobody", "--trap", "two-site", "--u-from", "-1000", "--u-to", "-900", "--points", "50"]);
    let curve = dir.path().join("twobody.csv");
    let fit_dir = dir.path().join("fit");
    ok(&fit_dir, &["spa-fit", "--curve", curve.to_str().unwrap(), "--r0000", "0.75"]);
    let stored = rows(&fit_dir.join("spa_fit.csv"));
    ok(&dir.path().join("computed"), &["spa-fit", "--trap", "two-site", "--v", "1"]);
    let computed = rows(&dir.path().join("computed").join("spa_fit.csv"));
    let c1 = |t: &[Vec<String>]| column(t, "c1")[0].parse::<f64>().unwrap();
    assert!((c1(&stored) - c1(&computed)).abs() < 1e-10 * c1(&computed).abs());
}

fn meta(path: &Path, key: &str) -> f64 {
    let text = std::fs::read_to_string(path).unwrap();
    let prefix = format!("# {key}: ");
    let line = text.lines().find(|l| l.starts_with(&prefix)).unwrap_or_else(|| panic!("no {key}"));
    line[prefix.len()..].parse().unwrap()
}

#[test]
fn delta_well_single_matches_continuum_sweep() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["single", "--trap", "delta-well", "--v0", "2", "--points", "5"]);
    ok(dir.path(), &["continuum", "--v0-from", "2", "--v0-to", "2", "--points", "1"]);
    let single = meta(&dir.path().join("single.csv"), "U_CIR_over_J");
    let swept: f64 = column(&rows(&dir.path().join("continuum.csv")), "UCIR_over_J")[0].parse().unwrap();
    assert!((single - swept).abs() < 1e-10 * swept.abs(), "{single} vs {swept}");
}

#[test]
fn tabulated_well() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("well.csv");
    std::fs::write(&table, "y,V\n-1,1.0\n0,0.0\n1,1.0\n").unwrap();
    ok(dir.path(), &["single", "--trap", "tabulated", "--table", table.to_str().unwrap(), "--outside", "2", "--y-max", "60", "--points", "5"]);
    assert!(meta(&dir.path().join("single.csv"), "U_CIR_over_J") < 0.0);
    ok(dir.path(), &["transverse", "--trap", "tabulated", "--table", table.to_str().unwrap(), "--outside", "2", "--y-max", "60"]);
    assert_eq!(rows(&dir.path().join("transverse.csv")).len(), 122);
}
