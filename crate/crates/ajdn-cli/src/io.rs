//! File formats: CSV panels, JSON jump lists, and the ground-truth sidecar.
//!
//! A panel CSV has one row per time point and one column per dimension. A
//! header row is detected automatically (any cell that does not parse as a
//! number) and can be forced either way. Values must be finite; the first
//! offending cell is reported with its row and column. Floats are written
//! with the shortest representation that round-trips, so a written panel
//! re-reads to bitwise-identical values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use ajdn_core::evaluate::TrueJump;
use ajdn_core::TimeSeriesPanel;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::fail::{data, CliResult, Failure};

/// Whether the first CSV row is a header.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeaderMode {
    /// Treat the first row as a header exactly when it fails to parse as
    /// numbers.
    Auto,
    Yes,
    No,
}

/// Reads a panel CSV. `label` names the file's role in error messages.
pub fn read_panel_csv(path: &Path, mode: HeaderMode) -> CliResult<TimeSeriesPanel> {
    let file = File::open(path)
        .map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));

    let mut dims: Vec<Vec<f64>> = Vec::new();
    let mut rows = 0usize;
    for (ri, record) in reader.records().enumerate() {
        let record = record.map_err(|e| data(format!("{}: {e}", path.display())))?;
        // 1-based line number for messages.
        let line = ri + 1;
        if ri == 0 {
            let parsed: Option<Vec<f64>> = parse_row(&record);
            let is_header = match mode {
                HeaderMode::Yes => true,
                HeaderMode::No => false,
                HeaderMode::Auto => parsed.is_none(),
            };
            if is_header {
                continue;
            }
            let values = parsed.ok_or_else(|| bad_cell(path, line, &record))?;
            check_finite(path, line, &values)?;
            dims = values.iter().map(|&v| vec![v]).collect();
            rows = 1;
            continue;
        }
        let values = parse_row(&record).ok_or_else(|| bad_cell(path, line, &record))?;
        check_finite(path, line, &values)?;
        if dims.is_empty() {
            dims = values.iter().map(|&v| vec![v]).collect();
            rows = 1;
            continue;
        }
        if values.len() != dims.len() {
            return Err(data(format!(
                "{}: row {line} has {} columns, expected {}",
                path.display(),
                values.len(),
                dims.len()
            )));
        }
        for (d, v) in dims.iter_mut().zip(&values) {
            d.push(*v);
        }
        rows += 1;
    }
    if rows == 0 {
        return Err(data(format!("{}: no data rows", path.display())));
    }
    TimeSeriesPanel::from_dims(dims).map_err(Failure::from)
}

fn parse_row(record: &csv::StringRecord) -> Option<Vec<f64>> {
    record.iter().map(|cell| cell.parse::<f64>().ok()).collect()
}

fn bad_cell(path: &Path, line: usize, record: &csv::StringRecord) -> Failure {
    for (ci, cell) in record.iter().enumerate() {
        if cell.parse::<f64>().is_err() {
            return data(format!(
                "{}: row {line}, column {}: cannot parse {cell:?} as a number",
                path.display(),
                ci + 1
            ));
        }
    }
    data(format!("{}: row {line}: cannot parse", path.display()))
}

fn check_finite(path: &Path, line: usize, values: &[f64]) -> CliResult<()> {
    for (ci, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(data(format!(
                "{}: row {line}, column {}: non-finite value {v}",
                path.display(),
                ci + 1
            )));
        }
    }
    Ok(())
}

/// Writes a panel CSV with a `dim_0, dim_1, ...` header row.
pub fn write_panel_csv(path: &Path, panel: &TimeSeriesPanel) -> CliResult<()> {
    let file = File::create(path)
        .map_err(|e| data(format!("cannot create {}: {e}", path.display())))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    let header: Vec<String> = (0..panel.p()).map(|r| format!("dim_{r}")).collect();
    writer.write_record(&header)?;
    let mut row = Vec::with_capacity(panel.p());
    for i in 0..panel.n() {
        row.clear();
        for r in 0..panel.p() {
            row.push(panel.value(r, i).to_string());
        }
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Serializes `value` as pretty JSON with a trailing newline. Output is
/// deterministic: struct fields keep declaration order and floats use the
/// shortest round-tripping form.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let file = File::create(path)
        .map_err(|e| data(format!("cannot create {}: {e}", path.display())))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut writer, value)?;
    writer.write_all(b"\n")?;
    writer.flush()?;
    Ok(())
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let file = File::open(path)
        .map_err(|e| data(format!("cannot open {}: {e}", path.display())))?;
    serde_json::from_reader(BufReader::new(file))
        .map_err(|e| data(format!("{}: {e}", path.display())))
}

/// Prints pretty JSON to stdout, or writes it to `out` when given.
pub fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult<()> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            let text = serde_json::to_string_pretty(value)?;
            println!("{text}");
            Ok(())
        }
    }
}

/// Sidecar describing a simulated panel and its planted jumps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthFile {
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    pub process: String,
    pub trend: bool,
    pub scenario: Option<ScenarioInfo>,
    pub jumps: Vec<TrueJump>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub kind: String,
    pub gamma: f64,
    pub delta: f64,
}
