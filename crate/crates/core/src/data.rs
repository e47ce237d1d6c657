use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An `n × d` sample stored row-major. Every entry is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptySample);
        }
        if values.len() != n * d {
            return Err(Error::DimensionMismatch {
                expected: n * d,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { n, d, values })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptySample)?;
        let d = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::Ragged {
                    row: i,
                    expected: d,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), d, values)
    }

    /// Single-column matrix from univariate values.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows().map(|r| r[j]).collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.d..(i + 1) * self.d]
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::InvalidArgument("no columns selected".into()));
        }
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.d) {
            return Err(Error::UnknownColumn(bad.to_string()));
        }
        let values = self.rows().flat_map(|r| cols.iter().map(move |&c| r[c])).collect();
        Self::new(self.n, cols.len(), values)
    }

    /// Applies `y = a·x + t` to every row, with `a` given row-major (`d × d`).
    pub fn affine(&self, a: &[f64], t: &[f64]) -> Result<Self> {
        let d = self.d;
        if a.len() != d * d {
            return Err(Error::DimensionMismatch {
                expected: d * d,
                found: a.len(),
            });
        }
        if t.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: t.len(),
            });
        }
        let mut values = Vec::with_capacity(self.values.len());
        for row in self.rows() {
            for (k, tk) in t.iter().enumerate() {
                let dot: f64 = a[k * d..(k + 1) * d].iter().zip(row).map(|(x, y)| x * y).sum();
                values.push(dot + tk);
            }
        }
        Self::new(self.n, d, values)
    }
}
