//! The Wisconsin Diagnostic Breast Cancer (WDBC) file: `id, diagnosis`
//! followed by 30 features, no header.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::parse_number;
use crate::{DataMatrix, Error, Result};

pub const WDBC_URL: &str =
    "https://archive.ics.uci.edu/ml/machine-learning-databases/breast-cancer-wisconsin/wdbc.data";
pub const WDBC_ROWS: usize = 569;

/// Feature names in file order (file column `i + 2`).
pub const WDBC_FEATURES: [&str; 30] = [
    "radius_mean",
    "texture_mean",
    "perimeter_mean",
    "area_mean",
    "smoothness_mean",
    "compactness_mean",
    "concavity_mean",
    "concave_points_mean",
    "symmetry_mean",
    "fractal_dimension_mean",
    "radius_se",
    "texture_se",
    "perimeter_se",
    "area_se",
    "smoothness_se",
    "compactness_se",
    "concavity_se",
    "concave_points_se",
    "symmetry_se",
    "fractal_dimension_se",
    "radius_worst",
    "texture_worst",
    "perimeter_worst",
    "area_worst",
    "smoothness_worst",
    "compactness_worst",
    "concavity_worst",
    "concave_points_worst",
    "symmetry_worst",
    "fractal_dimension_worst",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diagnosis {
    Benign,
    Malignant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Wdbc {
    pub ids: Vec<String>,
    pub diagnosis: Vec<Diagnosis>,
    /// `n × 30`, columns in [`WDBC_FEATURES`] order.
    pub features: DataMatrix,
    /// Non-fatal format problems (skipped rows, unexpected row count).
    pub warnings: Vec<String>,
}

impl Wdbc {
    pub fn feature_index(name: &str) -> Result<usize> {
        WDBC_FEATURES
            .iter()
            .position(|f| *f == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        Ok(self.features.column(Self::feature_index(name)?))
    }

    /// Sub-matrix of the named features, in the given order.
    pub fn select(&self, names: &[&str]) -> Result<DataMatrix> {
        let idx = names
            .iter()
            .map(|n| Self::feature_index(n))
            .collect::<Result<Vec<_>>>()?;
        self.features.select_columns(&idx)
    }
}

pub fn load_wdbc(path: impl AsRef<Path>) -> Result<Wdbc> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);
    let mut ids = Vec::new();
    let mut diagnosis = Vec::new();
    let mut values = Vec::new();
    let mut warnings = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        if rec.len() != 32 {
            warnings.push(format!("line {}: {} fields, expected 32; skipped", line + 1, rec.len()));
            continue;
        }
        let label = match rec[1].trim() {
            "M" => Diagnosis::Malignant,
            "B" => Diagnosis::Benign,
            other => {
                warnings.push(format!(
                    "line {}: diagnosis {other:?} is neither M nor B; skipped",
                    line + 1
                ));
                continue;
            }
        };
        let row: Option<Vec<f64>> = rec.iter().skip(2).map(parse_number).collect();
        let Some(row) = row else {
            warnings.push(format!("line {}: non-numeric feature; skipped", line + 1));
            continue;
        };
        ids.push(rec[0].trim().to_string());
        diagnosis.push(label);
        values.extend(row);
    }
    let n = ids.len();
    if n != WDBC_ROWS {
        warnings.push(format!("{n} rows read, expected {WDBC_ROWS}"));
    }
    if n == 0 {
        return Err(Error::NoUsableRows {
            path: path.to_path_buf(),
            usable: 0,
        });
    }
    Ok(Wdbc {
        ids,
        diagnosis,
        features: DataMatrix::new(n, 30, values)?,
        warnings,
    })
}
