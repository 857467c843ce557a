//! CSV tables and the JSON run summary.
//!
//! Every CSV file starts with one `#` comment line carrying the generation time;
//! everything after it depends only on the configuration and seed.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use shadows_core::geometry::TabulatedBody;
use shadows_core::DirectionGrid;

use crate::HarnessError;

/// Formats a float so that it parses back to the same value.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        x.to_string()
    }
}

/// In-memory table with a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        let io = |e: std::io::Error| HarnessError::io(path, e);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(io)?;
        }
        let mut file = fs::File::create(path).map_err(io)?;
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        writeln!(file, "# generated unix_time={stamp}").map_err(io)?;
        let mut w = csv::Writer::from_writer(file);
        let csv_err = |e: csv::Error| HarnessError::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        };
        w.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        w.flush().map_err(io)?;
        Ok(())
    }
}

fn axis_names(k: usize) -> Vec<String> {
    const NAMES: [&str; 3] = ["ux", "uy", "uz"];
    (0..k)
        .map(|i| NAMES.get(i).map_or_else(|| format!("u{}", i + 1), |s| s.to_string()))
        .collect()
}

/// `ux,uy,...` rows of a direction grid.
pub fn grid_table(grid: &DirectionGrid) -> Table {
    let header = axis_names(grid.dim());
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for d in grid.iter() {
        t.push(d.iter().map(|&x| num(x)).collect());
    }
    t
}

/// `ux,uy,...,h` rows of a tabulated body.
pub fn body_table(body: &TabulatedBody) -> Table {
    let mut header = axis_names(body.dim());
    header.push("h".into());
    let mut t = Table {
        header,
        rows: Vec::new(),
    };
    for (d, h) in body.directions().zip(body.support_values()) {
        let mut row: Vec<String> = d.iter().map(|&x| num(x)).collect();
        row.push(num(*h));
        t.push(row);
    }
    t
}

/// Reads a table written by [`Table::write`], skipping the comment line.
pub fn read_table(path: &Path) -> Result<Table, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    let csv_err = |e: csv::Error| HarnessError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let header = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(csv_err)?.iter().map(String::from).collect());
    }
    Ok(Table { header, rows })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let text = serde_json::to_string_pretty(value).map_err(|e| HarnessError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    fs::write(path, text + "\n").map_err(|e| HarnessError::io(path, e))
}

/// Files produced by one run, relative to the output directory.
#[derive(Debug, Clone, Default)]
pub struct Artifacts {
    pub tables: Vec<(String, Table)>,
}

impl Artifacts {
    pub fn add(&mut self, name: &str, table: Table) {
        self.tables.push((name.to_string(), table));
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn write_all(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        let mut out = Vec::new();
        for (name, table) in &self.tables {
            let path = dir.join(name);
            table.write(&path)?;
            out.push(path);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_has_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        Table::new(&["beta", "regime", "exponent", "lambda1", "lambda2"]).write(&path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with('#'));
        assert_eq!(lines[1], "beta,regime,exponent,lambda1,lambda2");
    }

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 1e-300, -2.5, 12345678.9] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(num(f64::INFINITY), "inf");
    }

    #[test]
    fn table_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), "x".into()]);
        t.write(&path).unwrap();
        assert_eq!(read_table(&path).unwrap(), t);
    }
}
