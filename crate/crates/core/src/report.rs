//! Deterministic table and plot-file emission.
//!
//! Every experiment writes byte-identical output for identical inputs, so
//! floats are always rendered with a fixed 17-significant-digit scientific
//! format and rows carry provenance columns (seed, generating-vector hash,
//! config hash) that make reruns comparable.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// First 16 hex characters of the SHA-256 of `input`; used to fingerprint
/// generating vectors and experiment configs in output tables.
pub fn short_hash(input: &str) -> String {
    let digest = Sha256::digest(input.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in &digest[..8] {
        write!(out, "{byte:02x}").expect("writing to String cannot fail");
    }
    out
}

/// Fixed-width scientific rendering with 17 significant digits, enough to
/// reconstruct the exact f64.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// A rectangular table rendered as comma-separated text with a header line.
#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) -> Result<()> {
        if cells.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                context: "table row",
                expected: self.columns.len(),
                actual: cells.len(),
            });
        }
        for cell in &cells {
            if cell.contains(',') || cell.contains('\n') {
                return Err(Error::InvalidConfig(format!(
                    "table cell `{cell}` contains a delimiter"
                )));
            }
        }
        self.rows.push(cells);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<String>] {
        &self.rows
    }

    /// Cell values of one named column, in row order.
    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx].as_str()).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_csv().as_bytes())
    }
}

/// One named curve for plot output.
#[derive(Debug, Clone)]
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

/// Writes series as a gnuplot-style data file: one `x y` block per series,
/// blocks separated by two blank lines so they are addressable with
/// `index n`.
pub fn write_dat(path: &Path, comment: &str, series: &[Series]) -> Result<()> {
    let mut out = String::new();
    for line in comment.lines() {
        writeln!(out, "# {line}").expect("writing to String cannot fail");
    }
    for (idx, s) in series.iter().enumerate() {
        if idx > 0 {
            out.push_str("\n\n");
        }
        writeln!(out, "# index {idx}: {}", s.name).expect("writing to String cannot fail");
        for &(x, y) in &s.points {
            writeln!(out, "{} {}", format_f64(x), format_f64(y))
                .expect("writing to String cannot fail");
        }
    }
    write_atomic(path, out.as_bytes())
}

/// Write-then-rename so partially written outputs never shadow a previous
/// complete file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
