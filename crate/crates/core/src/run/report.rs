//! Plot-ready CSV tables and JSON reports.
//!
//! Every float is written as `{:.16e}` (17 significant digits) so values
//! round-trip exactly and identical inputs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;

pub const ENTROPY_COLUMNS: [&str; 10] = [
    "alpha",
    "S0",
    "S1",
    "S2_G_derived",
    "S2_G_paper",
    "S2_NG_derived",
    "S2_NG_paper",
    "S_series",
    "S_numeric",
    "max_residual",
];

pub const KERNEL_COLUMNS: [&str; 7] = ["alpha", "k", "rho0", "rho1", "rho2G", "rho2NG", "rho_total"];

pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A header row plus numeric rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Self {
            header: header.iter().map(|h| h.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| crate::Error::Io(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
