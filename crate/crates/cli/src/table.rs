//! Row-oriented output tables with a fixed header and textual cells.

use std::io::Write;

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parsed numeric values of one column; empty cells become NaN.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        Some(self.rows.iter().map(|r| r[k].parse().unwrap_or(f64::NAN)).collect())
    }

    /// Rows where any `status*` column is not `ok`.
    pub fn failed_rows(&self) -> usize {
        let cols: Vec<usize> = (0..self.header.len())
            .filter(|&k| self.header[k].starts_with("status"))
            .collect();
        self.rows.iter().filter(|r| cols.iter().any(|&k| r[k] != "ok")).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Shortest round-trip scientific form; non-finite values become empty cells.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        String::new()
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `prefix_m` for m = 0..=n.
pub fn indexed(prefix: &str, n_atoms: usize) -> impl Iterator<Item = String> + '_ {
    (0..=n_atoms).map(move |m| format!("{prefix}_{m}"))
}

/// `prefix_m_n` for m < n.
pub fn paired(prefix: &str, n_atoms: usize) -> impl Iterator<Item = String> + '_ {
    cavity_dimer::propagator::coherence_pairs(n_atoms).map(move |(m, n)| format!("{prefix}_{m}_{n}"))
}
