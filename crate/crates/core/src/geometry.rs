//! Location and dispersion: spatial median, centering, coordinate-wise
//! medians, the comedian matrix and the VMedAD scale.

use serde::{Deserialize, Serialize};

use crate::medstats::median_in_place;
use crate::{norm, DataMatrix, Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 500;

/// Distances at or below this multiple of `1 + ‖m‖` count as coinciding.
const COINCIDENCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterEstimate {
    pub m: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Last relative step `‖m_{k+1} − m_k‖ / (1 + ‖m_k‖)`.
    pub final_step: f64,
    /// `Σ‖xᵢ − m‖` at the returned point.
    pub objective: f64,
}

fn objective(x: &DataMatrix, m: &[f64]) -> f64 {
    x.rows()
        .map(|r| r.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
        .sum()
}

/// One Weiszfeld step with the Vardi–Zhang correction for iterates that sit
/// on a data point.
fn weiszfeld_step(x: &DataMatrix, m: &[f64]) -> Vec<f64> {
    let d = x.ncols();
    let eps = COINCIDENCE * (1.0 + norm(m));
    let mut coinciding = 0usize;
    let mut weight_sum = 0.0;
    let mut weighted = vec![0.0; d];
    let mut pull = vec![0.0; d];
    for row in x.rows() {
        let dist = row.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if dist <= eps {
            coinciding += 1;
            continue;
        }
        let w = 1.0 / dist;
        weight_sum += w;
        for k in 0..d {
            weighted[k] += w * row[k];
            pull[k] += w * (row[k] - m[k]);
        }
    }
    if weight_sum == 0.0 {
        // every observation coincides with m
        return m.to_vec();
    }
    let t: Vec<f64> = weighted.iter().map(|v| v / weight_sum).collect();
    if coinciding == 0 {
        return t;
    }
    let r = norm(&pull);
    if r <= coinciding as f64 {
        // optimality condition holds at the data point
        return m.to_vec();
    }
    let gamma = coinciding as f64 / r;
    t.iter()
        .zip(m)
        .map(|(ti, mi)| (1.0 - gamma) * ti + gamma * mi)
        .collect()
}

/// Spatial median, recording the objective after every iteration.
///
/// The returned trace starts with the objective at the coordinate-wise median
/// used as the starting point.
pub fn spatial_median_traced(x: &DataMatrix, tol: f64, max_iter: usize) -> Result<(CenterEstimate, Vec<f64>)> {
    let mut m = coordwise_median(x)?;
    let mut trace = vec![objective(x, &m)];
    let mut final_step = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        let next = weiszfeld_step(x, &m);
        iterations += 1;
        let step: f64 = next.iter().zip(&m).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        final_step = step / (1.0 + norm(&m));
        let obj = objective(x, &next);
        let prev = *trace.last().unwrap();
        debug_assert!(
            obj <= prev * (1.0 + 1e-12) + 1e-300,
            "objective increased: {prev} -> {obj}"
        );
        trace.push(obj);
        m = next;
        if final_step <= tol {
            converged = true;
            break;
        }
    }
    let objective = *trace.last().unwrap();
    Ok((
        CenterEstimate {
            m,
            iterations,
            converged,
            final_step,
            objective,
        },
        trace,
    ))
}

/// Minimizer of `Σ‖xᵢ − m‖` by damped Weiszfeld iteration started at the
/// coordinate-wise median.
///
/// Non-convergence within `max_iter` is reported through
/// [`CenterEstimate::converged`] rather than as an error.
pub fn spatial_median(x: &DataMatrix, tol: f64, max_iter: usize) -> Result<CenterEstimate> {
    spatial_median_traced(x, tol, max_iter).map(|(c, _)| c)
}

/// Rows of `x` minus `m`.
pub fn center(x: &DataMatrix, m: &[f64]) -> Result<DataMatrix> {
    if m.len() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: x.ncols(),
            found: m.len(),
        });
    }
    let values = x.rows().flat_map(|r| r.iter().zip(m).map(|(a, b)| a - b)).collect();
    DataMatrix::new(x.nrows(), x.ncols(), values)
}

pub fn coordwise_median(u: &DataMatrix) -> Result<Vec<f64>> {
    let mut buf = Vec::with_capacity(u.nrows());
    Ok((0..u.ncols())
        .map(|j| {
            buf.clear();
            buf.extend(u.rows().map(|r| r[j]));
            median_in_place(&mut buf)
        })
        .collect())
}

/// Coordinate-wise median over a subset of rows.
pub(crate) fn coordwise_median_of(u: &DataMatrix, rows: &[usize]) -> Vec<f64> {
    let mut buf = Vec::with_capacity(rows.len());
    (0..u.ncols())
        .map(|j| {
            buf.clear();
            buf.extend(rows.iter().map(|&i| u.row(i)[j]));
            median_in_place(&mut buf)
        })
        .collect()
}

/// Entrywise median of outer products `uᵢuᵢᵀ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComedianMatrix {
    pub dim: usize,
    /// Row-major `dim × dim`.
    pub entries: Vec<f64>,
}

impl ComedianMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }
}

pub fn comedian_matrix(u: &DataMatrix) -> Result<ComedianMatrix> {
    let d = u.ncols();
    let mut entries = vec![0.0; d * d];
    let mut buf = Vec::with_capacity(u.nrows());
    for j in 0..d {
        for k in j..d {
            buf.clear();
            buf.extend(u.rows().map(|r| r[j] * r[k]));
            let med = median_in_place(&mut buf);
            entries[j * d + k] = med;
            entries[k * d + j] = med;
        }
    }
    Ok(ComedianMatrix { dim: d, entries })
}

/// `Φ₂^Med = Med(‖uᵢ‖²)^{1/2}`.
pub fn medad_scale(u: &DataMatrix) -> Result<f64> {
    let mut sq: Vec<f64> = u.rows().map(|r| r.iter().map(|v| v * v).sum()).collect();
    Ok(median_in_place(&mut sq).sqrt())
}
