//! Seeded samplers and the Monte Carlo experiment harness.
//!
//! Every draw comes from a ChaCha8 generator seeded with
//! `seed_from_u64(seed)`; replicate `r` of an experiment uses stream `r` of
//! that generator, so results do not depend on how replicates are scheduled.
//! Standard normals use the ziggurat method of `rand_distr::StandardNormal`,
//! and χ²_ν variates use `rand_distr::ChiSquared` (gamma sampling) for every
//! `ν`.

mod experiments;

pub use experiments::{
    run_breakdown, run_breakdown_n, run_consistency, run_equivariance_check, run_equivariance_with, run_figure1,
    Aggregate, Design, ExperimentResult, Figure1Record, GroupSummary, ReplicateRow,
};

use nalgebra::{Cholesky, DMatrix};
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geometry::{spatial_median, DEFAULT_MAX_ITER, DEFAULT_TOL};
use crate::{DataMatrix, Error, Result};

/// Generator for stream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Lower Cholesky factor of a row-major `d × d` covariance.
pub(crate) fn cholesky(cov: &[f64], d: usize) -> Result<DMatrix<f64>> {
    if cov.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: cov.len(),
        });
    }
    let m = DMatrix::from_row_slice(d, d, cov);
    if (0..d).any(|i| (0..i).any(|j| (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * (m[(i, i)].abs() + m[(j, j)].abs()))) {
        return Err(Error::NotPositiveDefinite);
    }
    Cholesky::new(m).map(|c| c.l()).ok_or(Error::NotPositiveDefinite)
}

fn push_affine<R: Rng + ?Sized>(rng: &mut R, mean: &[f64], l: &DMatrix<f64>, radial: f64, out: &mut Vec<f64>) {
    let d = mean.len();
    let g: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    for i in 0..d {
        let lg: f64 = (0..=i).map(|j| l[(i, j)] * g[j]).sum();
        out.push(mean[i] + radial * lg);
    }
}

pub(crate) fn mvn_rows<R: Rng + ?Sized>(rng: &mut R, n: usize, mean: &[f64], l: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(n * mean.len());
    for _ in 0..n {
        push_affine(rng, mean, l, 1.0, &mut out);
    }
    out
}

pub(crate) fn mvt_rows<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    mean: &[f64],
    l: &DMatrix<f64>,
    nu: f64,
) -> Result<Vec<f64>> {
    let chi = ChiSquared::new(nu).map_err(|e| Error::Domain(format!("degrees of freedom {nu}: {e}")))?;
    let mut out = Vec::with_capacity(n * mean.len());
    for _ in 0..n {
        let w: f64 = chi.sample(rng);
        push_affine(rng, mean, l, 1.0 / (w / nu).sqrt(), &mut out);
    }
    Ok(out)
}

/// `n` draws from `N_d(mean, cov)` as `mean + L·g`.
pub fn sample_mvn(n: usize, mean: &[f64], cov: &[f64], seed: u64) -> Result<DataMatrix> {
    let d = mean.len();
    let l = cholesky(cov, d)?;
    let values = mvn_rows(&mut substream(seed, 0), n, mean, &l);
    DataMatrix::new(n, d, values)
}

/// `n` draws from the multivariate t law, `mean + L·y/√(w/ν)` with `w ~ χ²_ν`.
pub fn sample_mvt(n: usize, mean: &[f64], cov: &[f64], nu: f64, seed: u64) -> Result<DataMatrix> {
    if !(nu > 0.0) {
        return Err(Error::Domain(format!("degrees of freedom must be positive, got {nu}")));
    }
    let d = mean.len();
    let l = cholesky(cov, d)?;
    let values = mvt_rows(&mut substream(seed, 0), n, mean, &l, nu)?;
    DataMatrix::new(n, d, values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Row-major `d × d`.
    pub cov: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub components: Vec<MixtureComponent>,
}

impl MixtureSpec {
    /// `0.70·N₂((50,50), 6²I) + 0.30·N₂((80,80), 3²I)`.
    pub fn asymmetric_example() -> Self {
        Self {
            components: vec![
                MixtureComponent {
                    weight: 0.7,
                    mean: vec![50.0, 50.0],
                    cov: vec![36.0, 0.0, 0.0, 36.0],
                },
                MixtureComponent {
                    weight: 0.3,
                    mean: vec![80.0, 80.0],
                    cov: vec![9.0, 0.0, 0.0, 9.0],
                },
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.components.first().map_or(0, |c| c.mean.len())
    }

    fn factors(&self) -> Result<Vec<DMatrix<f64>>> {
        let d = self.dim();
        if self.components.is_empty() || d == 0 {
            return Err(Error::InvalidArgument("mixture needs at least one component".into()));
        }
        let total: f64 = self.components.iter().map(|c| c.weight).sum();
        if self.components.iter().any(|c| !(c.weight > 0.0 && c.weight <= 1.0)) || (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "mixture weights must lie in (0, 1] and sum to 1 (sum {total})"
            )));
        }
        self.components
            .iter()
            .map(|c| {
                if c.mean.len() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: c.mean.len(),
                    });
                }
                cholesky(&c.cov, d)
            })
            .collect()
    }
}

pub(crate) fn mixture_rows<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    spec: &MixtureSpec,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let factors = spec.factors()?;
    let mut out = Vec::with_capacity(n * spec.dim());
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let k = if spec.components.len() == 1 {
            0
        } else {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            spec.components
                .iter()
                .position(|c| {
                    acc += c.weight;
                    u < acc
                })
                .unwrap_or(spec.components.len() - 1)
        };
        push_affine(rng, &spec.components[k].mean, &factors[k], 1.0, &mut out);
        labels.push(k);
    }
    Ok((out, labels))
}

/// `n` draws from a normal mixture; each row picks its component by weight.
pub fn sample_mixture(n: usize, spec: &MixtureSpec, seed: u64) -> Result<DataMatrix> {
    sample_mixture_labeled(n, spec, seed).map(|(x, _)| x)
}

/// As [`sample_mixture`], also returning each row's component index.
pub fn sample_mixture_labeled(n: usize, spec: &MixtureSpec, seed: u64) -> Result<(DataMatrix, Vec<usize>)> {
    let (values, labels) = mixture_rows(&mut substream(seed, 0), n, spec)?;
    Ok((DataMatrix::new(n, spec.dim(), values)?, labels))
}

/// Replaces `⌊ε·n⌋` randomly chosen rows by `M̂(X) + magnitude·direction`
/// plus Gaussian jitter of size `10⁻⁶·magnitude`. The direction defaults to
/// `(1,…,1)/√d`. Returns the new sample and the replaced row indices, sorted.
pub fn contaminate(
    x: &DataMatrix,
    epsilon: f64,
    magnitude: f64,
    direction: Option<&[f64]>,
    seed: u64,
) -> Result<(DataMatrix, Vec<usize>)> {
    contaminate_with(x, epsilon, magnitude, direction, &mut substream(seed, 0))
}

pub(crate) fn contaminate_with<R: Rng + ?Sized>(
    x: &DataMatrix,
    epsilon: f64,
    magnitude: f64,
    direction: Option<&[f64]>,
    rng: &mut R,
) -> Result<(DataMatrix, Vec<usize>)> {
    if !(0.0..0.5).contains(&epsilon) {
        return Err(Error::InvalidArgument(format!(
            "contamination fraction must lie in [0, 0.5), got {epsilon}"
        )));
    }
    let (n, d) = (x.nrows(), x.ncols());
    let dir: Vec<f64> = match direction {
        Some(v) => {
            if v.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                });
            }
            let len = crate::norm(v);
            if !(len > 0.0) {
                return Err(Error::InvalidArgument("contamination direction must be nonzero".into()));
            }
            v.iter().map(|c| c / len).collect()
        }
        None => vec![1.0 / (d as f64).sqrt(); d],
    };
    let k = (epsilon * n as f64).floor() as usize;
    if k == 0 {
        return Ok((x.clone(), Vec::new()));
    }
    let m = spatial_median(x, DEFAULT_TOL, DEFAULT_MAX_ITER)?.m;
    let mut idx = index::sample(rng, n, k).into_vec();
    idx.sort_unstable();
    let mut out = x.clone();
    let jitter = 1e-6 * magnitude;
    for &i in &idx {
        let row = out.row_mut(i);
        for j in 0..d {
            let e: f64 = rng.sample(StandardNormal);
            row[j] = m[j] + magnitude * dir[j] + jitter * e;
        }
    }
    Ok((out, idx))
}

/// Angle between two vectors in degrees; NaN if either is zero.
pub fn angle_deg(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (crate::norm(a), crate::norm(b));
    if na == 0.0 || nb == 0.0 {
        return f64::NAN;
    }
    let c: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() / (na * nb);
    c.clamp(-1.0, 1.0).acos().to_degrees()
}
