//! Tabular output: CSV with a header row and 17 significant digits, or one
//! JSON object per line.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::config::Format;
use crate::error::RunError;

/// Named numeric columns, one row per sample.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// `v` in scientific notation with 17 significant digits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_table(path: &Path, table: &Table, format: Format) -> Result<(), RunError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_path(path)?;
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(|&v| format_value(v)))?;
            }
            w.flush()?;
        }
        Format::JsonLines => {
            let mut w = BufWriter::new(File::create(path)?);
            for row in &table.rows {
                let obj: serde_json::Map<String, serde_json::Value> =
                    table.columns.iter().cloned().zip(row.iter().map(|&v| serde_json::json!(v))).collect();
                serde_json::to_writer(&mut w, &obj)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

/// Reads a CSV written by [`write_table`].
pub fn read_csv(path: &Path) -> Result<Table, RunError> {
    let mut r = csv::Reader::from_path(path)?;
    let columns = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| RunError::Config(format!("{}: {e}", path.display()))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { columns, rows })
}
