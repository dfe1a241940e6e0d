//! CSV and JSON writers. Floats use 17 significant digits so values
//! round-trip exactly; lines end in LF.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        match text {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            _ => Err(CliError::usage(format!(
                "unknown format {text:?} (expected csv or json)"
            ))),
        }
    }
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn csv_cell(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

/// Header plus one line per row.
pub fn csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CliError::internal)?;
    s.push('\n');
    Ok(s)
}

/// Writes to `path`, or stdout when absent or `-`.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text)
            .map_err(|e| CliError::failure(format!("cannot write {}: {e}", p.display()))),
        _ => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::failure(format!("stdout: {e}")))
        }
    }
}
