//! CSV tables and Wavefront OBJ meshes.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::embedding::TriangleMesh;
use crate::error::{Error, Result};

/// A header row plus string cells. Numbers are stored in a form that parses
/// back to the identical f64.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// 17 significant digits, enough to round-trip any f64.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Table {
    pub fn new<S: AsRef<str>>(headers: &[S]) -> Table {
        Table { headers: headers.iter().map(|h| h.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push_row(&mut self, row: Vec<String>) -> Result<()> {
        if row.len() != self.headers.len() {
            return Err(Error::invalid(format!("row has {} cells, table has {} columns", row.len(), self.headers.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn push_numbers(&mut self, row: &[f64]) -> Result<()> {
        self.push_row(row.iter().map(|v| format_f64(*v)).collect())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn column_f64(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name).ok_or_else(|| Error::invalid(format!("no column named '{name}'")))?;
        self.rows
            .iter()
            .map(|row| {
                row[idx]
                    .parse::<f64>()
                    .map_err(|e| Error::invalid(format!("column '{name}': '{}' is not a number ({e})", row[idx])))
            })
            .collect()
    }
}

pub fn write_csv(path: &Path, table: &Table) -> Result<()> {
    let wrap = |source: csv::Error| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::Writer::from_path(path).map_err(wrap)?;
    w.write_record(&table.headers).map_err(wrap)?;
    for row in &table.rows {
        w.write_record(row).map_err(wrap)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let wrap = |source: csv::Error| Error::Csv { path: path.to_path_buf(), source };
    let mut r = csv::Reader::from_path(path).map_err(wrap)?;
    let headers = r.headers().map_err(wrap)?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(wrap)?.iter().map(String::from).collect());
    }
    Ok(Table { headers, rows })
}

/// `v x y z` lines followed by `f i j k` lines with 1-based indices.
pub fn write_obj(path: &Path, mesh: &TriangleMesh) -> Result<()> {
    let io_err = |source: std::io::Error| Error::Io { path: path.to_path_buf(), source };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", format_f64(v[0]), format_f64(v[1]), format_f64(v[2])).map_err(io_err)?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Vertices and 0-based triangles of an OBJ file. Other record types are skipped.
pub fn read_obj(path: &Path) -> Result<(Vec<[f64; 3]>, Vec<[usize; 3]>)> {
    let io_err = |source: std::io::Error| Error::Io { path: path.to_path_buf(), source };
    let reader = BufReader::new(File::open(path).map_err(io_err)?);
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(io_err)?;
        let parse_err = |detail: String| Error::Parse { path: path.to_path_buf(), line: n + 1, detail };
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let mut v = [0.0; 3];
                for slot in v.iter_mut() {
                    let tok = parts.next().ok_or_else(|| parse_err("vertex needs three coordinates".into()))?;
                    *slot = tok.parse().map_err(|e| parse_err(format!("bad coordinate '{tok}': {e}")))?;
                }
                vertices.push(v);
            }
            Some("f") => {
                let mut t = [0usize; 3];
                for slot in t.iter_mut() {
                    let tok = parts.next().ok_or_else(|| parse_err("face needs three indices".into()))?;
                    let head = tok.split('/').next().unwrap_or(tok);
                    let idx: usize = head.parse().map_err(|e| parse_err(format!("bad index '{tok}': {e}")))?;
                    if idx == 0 {
                        return Err(parse_err("OBJ indices are 1-based".into()));
                    }
                    *slot = idx - 1;
                }
                triangles.push(t);
            }
            _ => {}
        }
    }
    if let Some(bad) = triangles.iter().flatten().find(|i| **i >= vertices.len()) {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            detail: format!("face index {} exceeds {} vertices", bad + 1, vertices.len()),
        });
    }
    Ok((vertices, triangles))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_round_trips() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, -0.0] {
            assert_eq!(format_f64(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut t = Table::new(&["a", "b"]);
        assert!(t.push_numbers(&[1.0]).is_err());
        assert!(t.push_numbers(&[1.0, 2.0]).is_ok());
    }
}
