//! CSV and key=value I/O. Every file is written through a temporary sibling
//! and renamed into place, so readers never observe a truncated file.

use std::fmt;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::dictionary::{Points, Table};
use crate::error::{Error, Result};

fn parse_f64(field: &str, line: usize, col: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}, column {col}: cannot parse {field:?} as a number")))
}

/// Reads `x,f1,...,fM`: one table per value column, sharing the abscissae.
pub fn read_tables_csv(path: impl AsRef<Path>) -> Result<Vec<Table>> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(Error::Parse("table CSV needs an x column and at least one value column".into()));
    }
    let mut xs = Vec::new();
    let mut cols = vec![Vec::new(); headers.len() - 1];
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        xs.push(parse_f64(&rec[0], line, &headers[0])?);
        for (k, col) in cols.iter_mut().enumerate() {
            col.push(parse_f64(&rec[k + 1], line, &headers[k + 1])?);
        }
    }
    cols.into_iter().map(|v| Table::new(xs.clone(), v)).collect()
}

/// Design points with an optional response column named `y`.
#[derive(Debug, Clone)]
pub struct DesignData {
    pub points: Points,
    pub response: Option<Vec<f64>>,
}

/// Reads `x1,...,xd[,y]`.
pub fn read_points_csv(path: impl AsRef<Path>) -> Result<DesignData> {
    let mut reader = csv::Reader::from_path(path.as_ref())?;
    let headers = reader.headers()?.clone();
    let y_col = headers.iter().position(|h| h.trim() == "y");
    let d = headers.len() - usize::from(y_col.is_some());
    if d == 0 {
        return Err(Error::Parse("design CSV has no coordinate columns".into()));
    }
    let mut coords = Vec::new();
    let mut ys = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        for (k, field) in rec.iter().enumerate() {
            let v = parse_f64(field, i + 2, &headers[k])?;
            if Some(k) == y_col {
                ys.push(v);
            } else {
                coords.push(v);
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::Parse("design CSV has no rows".into()));
    }
    Ok(DesignData {
        points: Points::new(d, coords)?,
        response: y_col.map(|_| ys),
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: impl AsRef<Path>, fill: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let path = path.as_ref();
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = std::io::BufWriter::new(tmp.as_file_mut());
        fill(&mut buf)?;
        buf.flush()?;
    }
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Writes a header and string rows as CSV, atomically.
pub fn write_csv_atomic<S: AsRef<str>>(
    path: impl AsRef<Path>,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<S>>,
) -> Result<()> {
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|s| s.as_ref()))?;
        }
        w.flush()?;
        Ok(())
    })
}

/// Row-major matrix CSV with header `j1..jM`.
pub fn write_matrix_csv(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let header: Vec<String> = (1..=m.ncols()).map(|j| format!("j{j}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect::<Vec<_>>());
    write_csv_atomic(path, &header, rows)
}

/// Ordered key=value report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvReport {
    entries: Vec<(String, String)>,
}

impl KvReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl fmt::Display) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self {
            entries: parse_kv(text)?,
        })
    }
}

impl fmt::Display for KvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

/// Parses `key=value` lines. Blank lines and `#` comments are skipped;
/// duplicate keys are an error.
pub fn parse_kv(text: &str) -> Result<Vec<(String, String)>> {
    let mut out: Vec<(String, String)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("line {}: expected key=value, got {line:?}", i + 1)))?;
        let (k, v) = (k.trim().to_string(), v.trim().to_string());
        if k.is_empty() {
            return Err(Error::Parse(format!("line {}: empty key", i + 1)));
        }
        if out.iter().any(|(e, _)| *e == k) {
            return Err(Error::Parse(format!("line {}: duplicate key {k:?}", i + 1)));
        }
        out.push((k, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_roundtrip() {
        let mut r = KvReport::new();
        r.push("kappa", 1.0).push("m", 5);
        let text = r.to_string();
        assert_eq!(text, "kappa=1\nm=5\n");
        assert_eq!(KvReport::parse(&text).unwrap(), r);
    }

    #[test]
    fn kv_comments_and_errors() {
        let kv = parse_kv("# header\n a = 1 # trailing\n\nb=x,y\n").unwrap();
        assert_eq!(kv, vec![("a".into(), "1".into()), ("b".into(), "x,y".into())]);
        assert!(parse_kv("novalue\n").is_err());
        assert!(parse_kv("a=1\na=2\n").is_err());
    }

    #[test]
    fn tables_and_points_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "x,f1,f2\n0,0,1\n1,2,1\n").unwrap();
        let tables = read_tables_csv(&p).unwrap();
        assert_eq!(tables.len(), 2);
        assert_eq!(tables[0].eval(0.25), 0.5);

        let q = dir.path().join("d.csv");
        std::fs::write(&q, "x1,x2,y\n1,2,3\n4,5,6\n").unwrap();
        let d = read_points_csv(&q).unwrap();
        assert_eq!(d.points.dim(), 2);
        assert_eq!(d.points.row(1), &[4.0, 5.0]);
        assert_eq!(d.response.unwrap(), vec![3.0, 6.0]);
    }

    #[test]
    fn bad_number_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        std::fs::write(&p, "x,f1\n0,abc\n1,2\n").unwrap();
        assert!(matches!(read_tables_csv(&p), Err(Error::Parse(_))));
    }

    #[test]
    fn atomic_write_leaves_no_temp_on_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        let r = write_atomic(&p, |_| Err(Error::Numeric("boom".into())));
        assert!(r.is_err());
        assert!(!p.exists());
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    }
}
