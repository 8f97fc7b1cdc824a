use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::ExperimentConfig;
use super::scenarios::{ResultTable, ScenarioOutput};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

fn csv_bytes<R: Serialize>(rows: &[R], columns: &[&str]) -> Result<Vec<u8>> {
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(columns).map_err(csv_err)?;
    }
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    let header = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
    if header != columns.join(",").as_bytes() {
        return Err(Error::Io(format!(
            "CSV header '{}' does not match the schema '{}'",
            String::from_utf8_lossy(header),
            columns.join(",")
        )));
    }
    Ok(bytes)
}

fn json_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s.into_bytes())
}

/// Serialized table in the requested format.
pub fn render(table: &ResultTable, format: Format) -> Result<Vec<u8>> {
    let cols = table.columns();
    match (table, format) {
        (ResultTable::ScanL(r), Format::Csv) => csv_bytes(r, cols),
        (ResultTable::ScanPi(r), Format::Csv) => csv_bytes(r, cols),
        (ResultTable::Compare(r), Format::Csv) => csv_bytes(r, cols),
        (ResultTable::ScanL(r), Format::Json) => json_bytes(r),
        (ResultTable::ScanPi(r), Format::Json) => json_bytes(r),
        (ResultTable::Compare(r), Format::Json) => json_bytes(r),
    }
}

/// Writes the table in each format plus `manifest.json` into `dir`.
///
/// Everything written is a function of the config alone unless `wall_time_s` is given.
pub fn write_outputs(
    dir: &Path,
    cfg: &ExperimentConfig,
    out: &ScenarioOutput,
    formats: &[Format],
    wall_time_s: Option<f64>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let name = out.table.scenario().name();
    let mut written = Vec::new();
    for &format in formats {
        let ext = match format {
            Format::Csv => "csv",
            Format::Json => "json",
        };
        let path = dir.join(format!("{name}.{ext}"));
        fs::write(&path, render(&out.table, format)?)?;
        written.push(path);
    }
    // The output location is not part of the experiment, so it stays out of the echo.
    let echo = ExperimentConfig {
        output: None,
        ..cfg.clone()
    };
    let mut manifest = json!({
        "tool": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": name,
        "seed": cfg.seed,
        "arm": cfg.arm,
        "columns": out.table.columns(),
        "rows": out.table.len(),
        "files": written
            .iter()
            .map(|p| p.file_name().expect("file name").to_string_lossy().into_owned())
            .collect::<Vec<_>>(),
        "config": echo,
        "details": out.details,
    });
    if let Some(t) = wall_time_s {
        manifest["wall_time_s"] = json!(t);
    }
    let path = dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.to_string()))?;
    text.push('\n');
    fs::write(&path, text)?;
    written.push(path);
    Ok(written)
}
