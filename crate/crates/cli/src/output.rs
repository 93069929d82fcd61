//! Deterministic artifact writing.
//!
//! CSV cells are written with Rust's shortest round-trip float formatting
//! and no quoting, so a rerun with the same config and seed produces the
//! same bytes regardless of worker count. The JSON envelope is the one
//! artifact that carries wall-clock fields and is therefore excluded from
//! byte-identity guarantees.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use serde::Serialize;

use crate::config::ExperimentConfig;

/// Formats a float cell; `None` becomes an empty cell, meaning the
/// quantity is not defined at that parameter point.
pub fn cell(value: Option<f64>) -> String {
    value.map_or_else(String::new, |x| x.to_string())
}

/// Writes a header row plus data rows. Cells must not contain commas,
/// quotes, or line breaks; every row must match the header width.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        ensure!(
            row.len() == header.len(),
            "row width {} does not match header width {} in {}",
            row.len(),
            header.len(),
            path.display()
        );
        for value in row {
            ensure!(
                !value.contains([',', '"', '\n', '\r']),
                "cell `{value}` needs quoting, which the plain CSV schema forbids"
            );
        }
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Reads a CSV written by [`write_csv`]; returns the header and rows and
/// checks the table is rectangular.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .context("empty CSV file")?
        .split(',')
        .map(str::to_string)
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        let row: Vec<String> = line.split(',').map(str::to_string).collect();
        ensure!(
            row.len() == header.len(),
            "ragged row in {}: {line}",
            path.display()
        );
        rows.push(row);
    }
    Ok((header, rows))
}

/// Reproducibility metadata written at the end of every run. The
/// `incomplete` flag marks a run that failed after flushing some outputs;
/// everything listed in `outputs` exists on disk even then.
#[derive(Serialize)]
pub struct Envelope<'a> {
    pub config: &'a ExperimentConfig,
    pub seed: u64,
    pub version: &'a str,
    pub started_at: String,
    pub runtime_seconds: f64,
    pub outputs: Vec<String>,
    pub incomplete: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn write_envelope(dir: &Path, envelope: &Envelope<'_>) -> Result<PathBuf> {
    let path = dir.join("envelope.json");
    let text = serde_json::to_string_pretty(envelope)?;
    fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Confirms that every emitted file exists and parses back in its
/// documented schema (CSV tables rectangular, JSON well-formed).
pub fn verify_outputs(paths: &[PathBuf]) -> Result<()> {
    for path in paths {
        match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => {
                read_csv(path)?;
            }
            Some("json") => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                serde_json::from_str::<serde_json::Value>(&text)
                    .with_context(|| format!("parsing {}", path.display()))?;
            }
            _ => anyhow::bail!("unexpected output extension: {}", path.display()),
        }
    }
    Ok(())
}
