//! Report assembly and deterministic CSV/JSON serialization.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use qnd_core::OutcomeGrid;

use crate::args::Format;
use crate::error::CliError;

/// Canonical description of a run. Output destination is excluded so the
/// same request always hashes the same.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub parameters: BTreeMap<&'static str, Value>,
}

impl RunConfig {
    pub fn new(command: &'static str) -> Self {
        Self { command, parameters: BTreeMap::new() }
    }

    pub fn with(mut self, key: &'static str, value: impl Serialize) -> Self {
        self.parameters.insert(key, serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    /// Hex SHA-256 of the compact JSON encoding; keys are sorted.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).unwrap_or_default();
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridInfo {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
    pub points: usize,
}

impl From<&OutcomeGrid<f64>> for GridInfo {
    fn from(g: &OutcomeGrid<f64>) -> Self {
        Self { lo: g.lo(), hi: g.hi(), step: g.step(), points: g.len() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: &'static str,
    pub config_hash: String,
    pub config: RunConfig,
    pub dims: BTreeMap<&'static str, usize>,
    pub grid: Option<GridInfo>,
    pub tolerances: BTreeMap<&'static str, f64>,
}

impl Metadata {
    pub fn new(config: RunConfig) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            config_hash: config.hash(),
            config,
            dims: BTreeMap::new(),
            grid: None,
            tolerances: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Self::Num(v) => format!("{v:.16e}"),
            Self::Text(s) => s.clone(),
            Self::Flag(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Self::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Self::Text(s.to_owned())
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Self::Flag(b)
    }
}

/// One command's data table, summary values and provenance.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub metadata: Metadata,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: BTreeMap<&'static str, Value>,
}

impl Report {
    pub fn new(metadata: Metadata, columns: Vec<&'static str>) -> Self {
        Self { metadata, columns, rows: Vec::new(), summary: BTreeMap::new() }
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &'static str, value: impl Serialize) {
        self.summary.insert(key, serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(csv_error)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_vec_pretty(self).unwrap_or_default();
        bytes.push(b'\n');
        bytes
    }

    fn summary_json(&self) -> Vec<u8> {
        #[derive(Serialize)]
        struct Summary<'a> {
            metadata: &'a Metadata,
            summary: &'a BTreeMap<&'static str, Value>,
        }
        let mut bytes = serde_json::to_vec_pretty(&Summary { metadata: &self.metadata, summary: &self.summary })
            .unwrap_or_default();
        bytes.push(b'\n');
        bytes
    }

    /// Writes the report. CSV written to a file gets a sibling
    /// `<stem>.summary.json` with metadata and summary values.
    pub fn write(&self, format: Format, out: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
        let body = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json(),
        };
        match out {
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(&body).and_then(|_| stdout.flush()) {
                    // a closed reader (`| head`) is not a failure of the run
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                    _ => Ok(Vec::new()),
                }
            }
            Some(path) => {
                std::fs::write(path, &body)?;
                let mut written = vec![path.to_path_buf()];
                if format == Format::Csv {
                    let summary = summary_path(path);
                    std::fs::write(&summary, self.summary_json())?;
                    written.push(summary);
                }
                Ok(written)
            }
        }
    }
}

pub fn summary_path(path: &Path) -> PathBuf {
    path.with_extension("summary.json")
}

fn csv_error(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => CliError::Io(io),
        other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}
