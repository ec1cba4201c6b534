//! Table assembly and file output.
//!
//! Numeric fields are rendered in scientific notation with 9 significant
//! digits and a locale-independent decimal point. Files are written to a
//! temporary sibling and renamed into place so partial output never lands at
//! the target path.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// One value of an output row.
#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => fmt_sig(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// 9 significant digits, scientific notation.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

#[derive(Debug, Clone)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn render(&self, tsv: bool) -> String {
        let sep = if tsv { '\t' } else { ',' };
        let mut out = String::new();
        writeln_joined(&mut out, self.header.iter().cloned(), sep);
        for row in &self.rows {
            writeln_joined(&mut out, row.iter().map(Cell::render), sep);
        }
        out
    }
}

fn writeln_joined(out: &mut String, fields: impl Iterator<Item = String>, sep: char) {
    let mut first = true;
    for f in fields {
        if !first {
            out.push(sep);
        }
        out.push_str(&f);
        first = false;
    }
    out.push('\n');
}

/// Write atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = tmp_path(path);
    std::fs::write(&tmp, contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Io(format!("cannot move output into place at {}: {e}", path.display())))?;
    Ok(())
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Sidecar path for a metadata echo: `<output>.meta`.
pub fn meta_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".meta");
    path.with_file_name(name)
}

/// Render `key=value` lines (already ordered by the caller).
pub fn render_kv(pairs: &[(String, String)]) -> String {
    let mut out = String::new();
    for (k, v) in pairs {
        let _ = writeln!(out, "{k}={v}");
    }
    out
}
