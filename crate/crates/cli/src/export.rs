use std::path::{Path, PathBuf};

use crate::error::CliError;

/// A sampled field: named columns and one row per sample point.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvField {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvField {
    pub fn new(name: &str, columns: &[&str]) -> CsvField {
        CsvField {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Writes `<directory>/<name>.csv` for each field. Values use the shortest
/// decimal form that parses back to the same `f64`.
pub fn export_csv(fields: &[CsvField], directory: &Path) -> Result<Vec<PathBuf>, CliError> {
    if fields.is_empty() {
        return Ok(Vec::new());
    }
    std::fs::create_dir_all(directory).map_err(|e| CliError::Io {
        path: directory.to_path_buf(),
        source: e,
    })?;
    let mut written = Vec::with_capacity(fields.len());
    for field in fields {
        let path = directory.join(format!("{}.csv", field.name));
        let csv_err = |e| CliError::Csv {
            path: path.clone(),
            source: e,
        };
        let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
        w.write_record(&field.columns).map_err(csv_err)?;
        for row in &field.rows {
            w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
        }
        w.flush().map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?;
        written.push(path);
    }
    Ok(written)
}
