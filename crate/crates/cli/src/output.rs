//! CSV and plain-text output. Numbers are written with 17 significant digits
//! (`{:.16e}`), which round-trips every `f64` exactly.

use std::fs;
use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes equally long columns under a header row.
pub fn write_columns(path: &Path, headers: &[&str], columns: &[&[f64]]) -> CliResult<()> {
    assert_eq!(headers.len(), columns.len(), "one header per column");
    let rows = columns.first().map_or(0, |c| c.len());
    assert!(columns.iter().all(|c| c.len() == rows), "columns must have equal length");
    let mut w = writer(path)?;
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(headers).map_err(csv_err)?;
    for i in 0..rows {
        w.write_record(columns.iter().map(|c| format_f64(c[i]))).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub(crate) fn writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        })
}

/// A CSV file read back as a header row and numeric columns. Lines starting
/// with `#` are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub columns: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.headers.iter().position(|h| h == name).map(|i| self.columns[i].as_slice())
    }
}

pub fn read_table(path: &Path) -> CliResult<Table> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err)?;
    let headers: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_owned).collect();
    let mut columns = vec![Vec::new(); headers.len()];
    for record in r.records() {
        let record = record.map_err(csv_err)?;
        for (col, field) in columns.iter_mut().zip(record.iter()) {
            let v = field
                .trim()
                .parse::<f64>()
                .map_err(|e| CliError::Config(format!("{}: bad number {field:?}: {e}", path.display())))?;
            col.push(v);
        }
    }
    Ok(Table { headers, columns })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let a = [0.1, 1.0 / 3.0, -2.5e-300, f64::MAX];
        let b = [std::f64::consts::PI, 0.0, 1e-17, -7.0];
        write_columns(&path, &["a", "b"], &[&a, &b]).unwrap();
        let t = read_table(&path).unwrap();
        assert_eq!(t.headers, vec!["a", "b"]);
        assert_eq!(t.column("a").unwrap(), &a);
        assert_eq!(t.column("b").unwrap(), &b);
        let raw = std::fs::read_to_string(&path).unwrap();
        assert!(!raw.contains('\r'));
        assert!(raw.starts_with("a,b\n"));
    }
}
