//! Data ingestion and the JSON report format.

mod report;
mod wdbc;

pub use report::{ReportConfig, ReportDocument, ReportMetadata, ShellDiagnostics, SCHEMA_VERSION};
pub use wdbc::{load_wdbc, Diagnosis, Wdbc, WDBC_FEATURES, WDBC_ROWS, WDBC_URL};

use std::path::Path;

use crate::{DataMatrix, Error, Result};

/// A column chosen by zero-based index or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl ColumnSelector {
    /// Parses a comma-separated list; entries that parse as integers are
    /// indices, everything else is a name.
    pub fn parse_list(spec: &str) -> Vec<Self> {
        spec.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map(Self::Index).unwrap_or_else(|_| Self::Name(s.to_string())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedCsv {
    pub data: DataMatrix,
    /// Names of the selected columns (`col<i>` when the file has no header).
    pub columns: Vec<String>,
    /// Rows dropped because a selected field was missing or not numeric.
    pub dropped: usize,
}

/// Parses a decimal number, independent of locale. Non-finite values are
/// rejected.
pub fn parse_number(field: &str) -> Option<f64> {
    let v: f64 = field.trim().parse().ok()?;
    v.is_finite().then_some(v)
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads the selected numeric columns of a comma-separated file. An empty
/// selector list selects every column of the first record.
pub fn load_csv(path: impl AsRef<Path>, selectors: &[ColumnSelector], has_header: bool) -> Result<LoadedCsv> {
    let path = path.as_ref();
    let file = open(path)?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .from_reader(file);
    let csv_err = |e: csv::Error| Error::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    };

    let header: Option<Vec<String>> = if has_header {
        Some(
            rdr.headers()
                .map_err(csv_err)?
                .iter()
                .map(|h| h.trim().to_string())
                .collect(),
        )
    } else {
        None
    };

    let mut records = rdr.records();
    let mut pending = None;
    let width = match &header {
        Some(h) => h.len(),
        None => match records.next() {
            Some(r) => {
                let r = r.map_err(csv_err)?;
                let w = r.len();
                pending = Some(r);
                w
            }
            None => 0,
        },
    };

    let mut idx = Vec::new();
    let mut columns = Vec::new();
    if selectors.is_empty() {
        idx.extend(0..width);
    }
    for s in selectors {
        match s {
            ColumnSelector::Index(i) => {
                if *i >= width {
                    return Err(Error::UnknownColumn(i.to_string()));
                }
                idx.push(*i);
            }
            ColumnSelector::Name(name) => {
                let h = header.as_ref().ok_or(Error::NameWithoutHeader)?;
                let i = h
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| Error::UnknownColumn(name.clone()))?;
                idx.push(i);
            }
        }
    }
    for &i in &idx {
        columns.push(header.as_ref().map_or_else(|| format!("col{i}"), |h| h[i].clone()));
    }
    if idx.is_empty() {
        return Err(Error::NoUsableRows {
            path: path.to_path_buf(),
            usable: 0,
        });
    }

    let mut values = Vec::new();
    let mut n = 0;
    let mut dropped = 0;
    for rec in pending.into_iter().map(Ok).chain(records) {
        let rec = rec.map_err(csv_err)?;
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let row: Option<Vec<f64>> = idx.iter().map(|&i| rec.get(i).and_then(parse_number)).collect();
        match row {
            Some(r) => {
                values.extend(r);
                n += 1;
            }
            None => dropped += 1,
        }
    }
    if n < 2 {
        return Err(Error::NoUsableRows {
            path: path.to_path_buf(),
            usable: n,
        });
    }
    Ok(LoadedCsv {
        data: DataMatrix::new(n, idx.len(), values)?,
        columns,
        dropped,
    })
}

/// Writes a matrix as CSV with the given header.
pub fn write_matrix_csv<W: std::io::Write>(x: &DataMatrix, header: &[String], w: W) -> Result<()> {
    let err = |e: csv::Error| Error::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    };
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header).map_err(err)?;
    for r in x.rows() {
        wtr.write_record(r.iter().map(f64::to_string)).map_err(err)?;
    }
    wtr.flush().map_err(|e| Error::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn plain_numeric() {
        let f = temp("1,2\n3,4\n5,6\n");
        let got = load_csv(f.path(), &[], false).unwrap();
        assert_eq!(
            got.data,
            DataMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]).unwrap()
        );
        assert_eq!(got.columns, ["col0", "col1"]);
        assert_eq!(got.dropped, 0);
    }

    #[test]
    fn malformed_row_dropped() {
        let f = temp("a,b\n1,2\nx,4\n5,6\n7,8\n");
        let got = load_csv(f.path(), &[], true).unwrap();
        assert_eq!(got.data.nrows(), 3);
        assert_eq!(got.dropped, 1);
    }

    #[test]
    fn selectors() {
        let f = temp("id,x,y\nq,1.5,-2\nr,2.5,1e3\n");
        let by_name = load_csv(f.path(), &ColumnSelector::parse_list("y, x"), true).unwrap();
        assert_eq!(by_name.columns, ["y", "x"]);
        assert_eq!(by_name.data.row(1), &[1000.0, 2.5]);
        let by_index = load_csv(f.path(), &ColumnSelector::parse_list("1,2"), true).unwrap();
        assert_eq!(by_index.data.row(0), &[1.5, -2.0]);
        assert!(matches!(
            load_csv(f.path(), &ColumnSelector::parse_list("z"), true),
            Err(Error::UnknownColumn(_))
        ));
        assert!(matches!(
            load_csv(f.path(), &ColumnSelector::parse_list("9"), true),
            Err(Error::UnknownColumn(_))
        ));
        let g = temp("1,2\n3,4\n");
        assert!(matches!(
            load_csv(g.path(), &ColumnSelector::parse_list("x"), false),
            Err(Error::NameWithoutHeader)
        ));
    }

    #[test]
    fn errors_are_distinct() {
        let missing = load_csv("/nonexistent/data.csv", &[], true).unwrap_err();
        assert!(matches!(missing, Error::Io { .. }));
        assert!(missing.to_string().contains("/nonexistent/data.csv"));
        let f = temp("a,b\nx,y\n1,2\n");
        assert!(matches!(
            load_csv(f.path(), &[], true),
            Err(Error::NoUsableRows { usable: 1, .. })
        ));
    }

    #[test]
    fn locale_independent() {
        assert_eq!(parse_number(" 0.25 "), Some(0.25));
        assert_eq!(parse_number("0,25"), None);
        assert_eq!(parse_number("NaN"), None);
        assert_eq!(parse_number("-1.5e-3"), Some(-0.0015));
    }
}
