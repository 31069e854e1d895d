//! Sweep serialization and atomic file output.
//!
//! CSV columns are fixed: `variable,thermo_bps,shannon_bps,lower_bps,upper_bps,warnings`.
//! Numbers use Rust's `{:.16e}` formatting (17 significant digits, `.`
//! decimal separator, exponent written as `e7`/`e-3`), independent of locale.
//! A column not requested by the sweep is left empty. Warnings in one row are
//! joined with `"; "`.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thermimo::{PhysicalConstants, SweepOutput, SweepRecord, SweepSpec};

use crate::CliError;

pub const CSV_HEADER: [&str; 6] = [
    "variable",
    "thermo_bps",
    "shannon_bps",
    "lower_bps",
    "upper_bps",
    "warnings",
];

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DataFormat {
    Csv,
    Json,
}

impl DataFormat {
    /// `.json` selects JSON; anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => DataFormat::Json,
            _ => DataFormat::Csv,
        }
    }
}

pub fn sweep_csv(spec: &SweepSpec, records: &[SweepRecord]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    let col = |want: SweepOutput, v: f64| {
        if spec.outputs.contains(&want) {
            format_number(v)
        } else {
            String::new()
        }
    };
    for r in records {
        let c = &r.capacity_result;
        let warnings: Vec<String> = c.warnings.iter().map(ToString::to_string).collect();
        w.write_record([
            format_number(r.variable_value),
            col(SweepOutput::Thermo, c.thermo_capacity),
            col(SweepOutput::Shannon, c.shannon_reference),
            col(SweepOutput::LowerBound, c.lower_bound),
            col(SweepOutput::UpperBound, c.upper_bound),
            warnings.join("; "),
        ])
        .map_err(io)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct SweepDocument<'a> {
    tool: &'static str,
    version: &'static str,
    constants: PhysicalConstants,
    sweep: &'a SweepSpec,
    records: &'a [SweepRecord],
}

pub fn sweep_json(spec: &SweepSpec, records: &[SweepRecord]) -> Result<Vec<u8>, CliError> {
    let doc = SweepDocument {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        constants: PhysicalConstants::TABLE1,
        sweep: spec,
        records,
    };
    let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

pub fn render_sweep(
    format: DataFormat,
    spec: &SweepSpec,
    records: &[SweepRecord],
) -> Result<Vec<u8>, CliError> {
    match format {
        DataFormat::Csv => sweep_csv(spec, records),
        DataFormat::Json => sweep_json(spec, records),
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".partial");
    PathBuf::from(name)
}
