//! Classical comparators: Mardia's skewness and kurtosis and the MRSz
//! (Móri–Rohatgi–Székely) skewness vector and kurtosis matrix.
//!
//! Observations are standardized as `zᵢ = S^{−1/2}(xᵢ − x̄)` with the
//! symmetric inverse square root of the covariance `S`. The covariance
//! divisor defaults to `n − 1`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::{DataMatrix, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovDivisor {
    /// `1/(n − 1)`.
    #[default]
    Sample,
    /// `1/n`.
    Population,
}

impl std::str::FromStr for CovDivisor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sample" | "n-1" => Ok(Self::Sample),
            "population" | "n" => Ok(Self::Population),
            other => Err(Error::InvalidArgument(format!("unknown covariance divisor {other:?}"))),
        }
    }
}

pub fn mean(x: &DataMatrix) -> Vec<f64> {
    let mut m = vec![0.0; x.ncols()];
    for r in x.rows() {
        for (a, v) in m.iter_mut().zip(r) {
            *a += v;
        }
    }
    let n = x.nrows() as f64;
    m.iter_mut().for_each(|a| *a /= n);
    m
}

pub fn covariance(x: &DataMatrix, divisor: CovDivisor) -> Result<DMatrix<f64>> {
    let n = x.nrows();
    let denom = match divisor {
        CovDivisor::Sample if n < 2 => return Err(Error::DegenerateCovariance),
        CovDivisor::Sample => (n - 1) as f64,
        CovDivisor::Population => n as f64,
    };
    let d = x.ncols();
    let m = mean(x);
    let mut s = DMatrix::zeros(d, d);
    for r in x.rows() {
        for j in 0..d {
            let cj = r[j] - m[j];
            for k in j..d {
                s[(j, k)] += cj * (r[k] - m[k]);
            }
        }
    }
    for j in 0..d {
        for k in j..d {
            let v = s[(j, k)] / denom;
            s[(j, k)] = v;
            s[(k, j)] = v;
        }
    }
    Ok(s)
}

/// Standardized observations `zᵢ = S^{−1/2}(xᵢ − x̄)`, one per row.
pub fn standardize(x: &DataMatrix, divisor: CovDivisor) -> Result<DataMatrix> {
    let n = x.nrows();
    let d = x.ncols();
    if n <= d {
        return Err(Error::DegenerateCovariance);
    }
    let s = covariance(x, divisor)?;
    let eig = SymmetricEigen::new(s);
    let max_ev = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if eig
        .eigenvalues
        .iter()
        .any(|&ev| !(ev > max_ev * 1e-13) || !ev.is_finite())
    {
        return Err(Error::DegenerateCovariance);
    }
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|ev| 1.0 / ev.sqrt()));
    let root = &eig.eigenvectors * inv_sqrt * eig.eigenvectors.transpose();
    let m = mean(x);
    let mut values = Vec::with_capacity(n * d);
    let mut c = vec![0.0; d];
    for r in x.rows() {
        for k in 0..d {
            c[k] = r[k] - m[k];
        }
        for j in 0..d {
            values.push((0..d).map(|k| root[(j, k)] * c[k]).sum());
        }
    }
    DataMatrix::new(n, d, values)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn mardia_from_z(z: &DataMatrix) -> (f64, f64) {
    let n = z.nrows();
    let row_sum = |i: usize| -> f64 {
        let zi = z.row(i);
        z.rows().map(|zj| dot(zi, zj).powi(3)).sum()
    };
    #[cfg(feature = "parallel")]
    let sums: Vec<f64> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(row_sum).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let sums: Vec<f64> = (0..n).map(row_sum).collect();
    let nf = n as f64;
    let b1 = sums.iter().sum::<f64>() / (nf * nf);
    let b2 = z.rows().map(|r| dot(r, r).powi(2)).sum::<f64>() / nf;
    (b1, b2)
}

/// Mardia's `(b₁,d, b₂,d)`. `O(n²·d)`.
pub fn mardia(x: &DataMatrix, divisor: CovDivisor) -> Result<(f64, f64)> {
    Ok(mardia_from_z(&standardize(x, divisor)?))
}

fn mrsz_skew_from_z(z: &DataMatrix) -> Vec<f64> {
    let d = z.ncols();
    let mut g = vec![0.0; d];
    for r in z.rows() {
        let sq = dot(r, r);
        for k in 0..d {
            g[k] += sq * r[k];
        }
    }
    let n = z.nrows() as f64;
    g.iter().map(|v| v / n).collect()
}

/// MRSz skewness vector `(1/n) Σ ‖zᵢ‖² zᵢ`.
pub fn mrsz_skew(x: &DataMatrix, divisor: CovDivisor) -> Result<Vec<f64>> {
    Ok(mrsz_skew_from_z(&standardize(x, divisor)?))
}

fn mrsz_kurt_from_z(z: &DataMatrix) -> (Vec<f64>, Vec<f64>) {
    let d = z.ncols();
    let mut raw = vec![0.0; d * d];
    for r in z.rows() {
        let sq = dot(r, r);
        for j in 0..d {
            for k in j..d {
                raw[j * d + k] += sq * r[j] * r[k];
            }
        }
    }
    let n = z.nrows() as f64;
    for j in 0..d {
        for k in j..d {
            let v = raw[j * d + k] / n;
            raw[j * d + k] = v;
            raw[k * d + j] = v;
        }
    }
    let mut centered = raw.clone();
    for j in 0..d {
        centered[j * d + j] -= (d + 2) as f64;
    }
    (raw, centered)
}

/// MRSz kurtosis matrix, raw `(1/n) Σ ‖zᵢ‖² zᵢzᵢᵀ` and centered (raw minus
/// `(d+2)·I`), both row-major.
pub fn mrsz_kurt(x: &DataMatrix, divisor: CovDivisor) -> Result<(Vec<f64>, Vec<f64>)> {
    Ok(mrsz_kurt_from_z(&standardize(x, divisor)?))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineReport {
    pub divisor: CovDivisor,
    pub mardia_skew: f64,
    pub mardia_kurt: f64,
    pub mrsz_skew: Vec<f64>,
    pub mrsz_kurt_raw: Vec<f64>,
    pub mrsz_kurt_centered: Vec<f64>,
}

pub fn baseline_report(x: &DataMatrix, divisor: CovDivisor) -> Result<BaselineReport> {
    let z = standardize(x, divisor)?;
    let (mardia_skew, mardia_kurt) = mardia_from_z(&z);
    let (mrsz_kurt_raw, mrsz_kurt_centered) = mrsz_kurt_from_z(&z);
    Ok(BaselineReport {
        divisor,
        mardia_skew,
        mardia_kurt,
        mrsz_skew: mrsz_skew_from_z(&z),
        mrsz_kurt_raw,
        mrsz_kurt_centered,
    })
}
