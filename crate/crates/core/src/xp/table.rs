//! Column tables and their CSV form.
//!
//! Values are written in scientific notation with 12 significant digits, so a
//! read followed by a write reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::DimensionMismatch {
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// Rounds every entry to what the CSV form will hold.
    pub fn quantized(&self) -> Self {
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|v| format_value(*v).parse().expect("formatted f64")).collect())
            .collect();
        Self {
            columns: self.columns.clone(),
            rows,
        }
    }
}

pub fn format_value(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn to_csv_string(table: &Table) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(format!("csv encoding: {e}"));
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| format_value(*v))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(format!("csv encoding: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

pub fn emit_csv(table: &Table, path: &Path) -> Result<()> {
    let text = to_csv_string(table)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let bad = |e: csv::Error| Error::Config(format!("{}: {e}", path.display()));
    let columns: Vec<String> = r.headers().map_err(bad)?.iter().map(str::to_owned).collect();
    let mut table = Table::new(columns);
    for rec in r.records() {
        let rec = rec.map_err(bad)?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("{}: not a number: {s:?}", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        table.push(row)?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["t_us", "F_avg"]);
        assert_eq!(to_csv_string(&t).unwrap(), "t_us,F_avg\n");
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_value(std::f64::consts::PI), "3.14159265359e0");
        assert_eq!(format_value(-0.00123), "-1.23000000000e-3");
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let mut t = Table::new(["epsilon", "F_avg_not"]);
        t.push(vec![-0.2, 0.986_372_912_345_678]).unwrap();
        t.push(vec![1.0 / 3.0, 1e-300]).unwrap();
        emit_csv(&t, &path).unwrap();
        let back = read_csv(&path).unwrap();
        assert_eq!(back, t.quantized());
        let again = dir.path().join("b.csv");
        emit_csv(&back, &again).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());
    }

    #[test]
    fn ragged_row_rejected() {
        let mut t = Table::new(["a", "b"]);
        assert!(t.push(vec![1.0]).is_err());
    }

    #[test]
    fn lf_line_endings() {
        let mut t = Table::new(["x"]);
        t.push(vec![1.0]).unwrap();
        let s = to_csv_string(&t).unwrap();
        assert!(!s.contains('\r'));
        assert_eq!(s.lines().count(), 2);
    }
}
