use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{CliError, CliResult};

/// One CSV cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// Twelve significant digits, shortest form, `.` as decimal separator.
pub fn format_real(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{v:.11e}").parse().expect("formatted float parses");
    if (1e-5..1e15).contains(&r.abs()) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Real(v) => f.write_str(&format_real(*v)),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Missing => Ok(()),
        }
    }
}

/// A fixed-header table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &'static [&'static str]) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_string()))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
    }
}

/// Paths of the files written by one run.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub csv: PathBuf,
    pub meta: PathBuf,
}

pub fn write(dir: &Path, name: &str, table: &Table, meta: &Value) -> CliResult<Written> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv = dir.join(format!("{name}.csv"));
    let meta_path = dir.join(format!("{name}.meta.json"));
    std::fs::write(&csv, table.to_csv()).map_err(|e| CliError::io(&csv, e))?;
    let text = serde_json::to_string_pretty(meta).expect("json value serializes") + "\n";
    std::fs::write(&meta_path, text).map_err(|e| CliError::io(&meta_path, e))?;
    Ok(Written {
        csv,
        meta: meta_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_real(0.456), "0.456");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_real(2.0 / 3.0 * 1e-9), "6.66666666667e-10");
        assert_eq!(format_real(-12345.678901234567), "-12345.6789012");
        assert_eq!(format_real(4.0), "4");
        assert_eq!(format_real(0.0), "0");
        assert_eq!(format_real(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![0.5.into(), 3u64.into(), Cell::from(None::<f64>)]);
        assert_eq!(t.to_csv(), "a,b,c\n0.5,3,\n");
    }
}
