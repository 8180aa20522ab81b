use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::Result;

/// Fixed 17-significant-digit rendering, lossless for every finite double.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// Numeric table written as CSV with a header row.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Two-column table from an abscissa and values.
    pub fn columns(x_name: &str, y_name: &str, x: &[f64], y: &[f64]) -> Self {
        let mut t = Self::new([x_name, y_name]);
        t.rows = x.iter().zip(y).map(|(&a, &b)| vec![a, b]).collect();
        t
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_to(&self, out: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&v| format_value(v)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        self.write_to(File::create(path)?)
    }
}

/// Metadata written next to every data file.
#[derive(Clone, Debug, Serialize)]
pub struct Sidecar {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub data_file: Option<String>,
    pub config: serde_json::Value,
    pub warnings: Vec<String>,
    pub results: serde_json::Value,
    pub wall_time_s: f64,
}

impl Sidecar {
    pub fn write(&self, path: &Path) -> Result<()> {
        let mut f = File::create(path)?;
        serde_json::to_writer_pretty(&mut f, self)?;
        f.write_all(b"\n")?;
        Ok(())
    }
}

/// `foo.csv` -> `foo.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}
