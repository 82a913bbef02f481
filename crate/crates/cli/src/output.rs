//! CSV tables and their schema files.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::CliError;

/// Column name and its description for the schema file.
pub type Column = (&'static str, &'static str);

pub struct Table {
    pub subcommand: &'static str,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(subcommand: &'static str, columns: Vec<Column>) -> Self {
        Table {
            subcommand,
            columns,
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(self.columns.iter().map(|c| c.0)).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn schema(&self) -> serde_json::Value {
        json!({
            "subcommand": self.subcommand,
            "version": env!("CARGO_PKG_VERSION"),
            "columns": self
                .columns
                .iter()
                .map(|(name, description)| json!({ "name": name, "description": description }))
                .collect::<Vec<_>>(),
        })
    }

    /// Writes the CSV to `out` (plus `<out>.schema.json`), or to stdout.
    pub fn emit(&self, out: Option<&Path>) -> Result<(), CliError> {
        let bytes = self.to_csv()?;
        match out {
            Some(path) => {
                write_file(path, &bytes)?;
                write_json(&schema_path(path), &self.schema())
            }
            None => write_stdout(&bytes),
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn schema_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".schema.json");
    PathBuf::from(s)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

pub fn write_stdout(bytes: &[u8]) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| CliError::Io(e.to_string()))
}

pub fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
