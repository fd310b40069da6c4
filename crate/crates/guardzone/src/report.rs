//! CSV and text report emission.
//!
//! Output is byte-reproducible: floats are printed in full-precision
//! scientific notation (17 significant digits round-trips every f64), line
//! endings are LF, and nothing environment-dependent such as a timestamp
//! ever enters a file. An empty series is an error and leaves no file
//! behind.

use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("refusing to write an empty series to {0}")]
    EmptySeries(String),
    #[error("row {row} has {got} columns, header has {expected}")]
    ColumnMismatch {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

/// Full-precision scientific notation; parsing the result recovers the
/// exact f64.
pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

/// Writes a CSV file with a header row and one row per record.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<(), ReportError> {
    if rows.is_empty() {
        return Err(ReportError::EmptySeries(path.display().to_string()));
    }
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for (index, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(ReportError::ColumnMismatch {
                row: index,
                got: row.len(),
                expected: header.len(),
            });
        }
        let cells: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes a plain-text report, normalizing to a trailing newline.
pub fn write_text(path: &Path, content: &str) -> Result<(), ReportError> {
    let mut text = content.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    std::fs::write(path, text).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}
