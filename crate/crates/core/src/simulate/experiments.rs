use std::collections::BTreeMap;
use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{cholesky, contaminate_with, mixture_rows, mvn_rows, mvt_rows, substream, MixtureSpec};
use crate::baselines::{mardia, mrsz_skew};
use crate::depth::{assign_shells, ShellOrder};
use crate::medstats::median;
use crate::refdist::{normal_reference, t_reference, ReferenceValues};
use crate::vmoments::{analyze, full_report, VMedadConfig, VMedadReport};
use crate::{norm, CovDivisor, DataMatrix, Error, Result};

/// Sampling design of an experiment. The elliptical designs are standardized
/// (zero location, identity scatter).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Design {
    Normal { d: usize },
    StudentT { d: usize, nu: f64 },
    Mixture { spec: MixtureSpec },
}

impl Design {
    pub fn dim(&self) -> usize {
        match self {
            Design::Normal { d } | Design::StudentT { d, .. } => *d,
            Design::Mixture { spec } => spec.dim(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Design::Normal { d } => format!("N_{d}(0, I)"),
            Design::StudentT { d, nu } => format!("t_{d}(0, I; nu = {nu})"),
            Design::Mixture { spec } => format!(
                "normal mixture, {} components, d = {}",
                spec.components.len(),
                spec.dim()
            ),
        }
    }

    /// Population reference values, for the elliptical designs only.
    pub fn reference(&self) -> Result<Option<ReferenceValues>> {
        match self {
            Design::Normal { d } => normal_reference(*d).map(Some),
            Design::StudentT { d, nu } => t_reference(*d, *nu).map(Some),
            Design::Mixture { .. } => Ok(None),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<DataMatrix> {
        let d = self.dim();
        let identity = || {
            let mut v = vec![0.0; d * d];
            (0..d).for_each(|i| v[i * d + i] = 1.0);
            v
        };
        let values = match self {
            Design::Normal { .. } => mvn_rows(rng, n, &vec![0.0; d], &cholesky(&identity(), d)?),
            Design::StudentT { nu, .. } => mvt_rows(rng, n, &vec![0.0; d], &cholesky(&identity(), d)?, *nu)?,
            Design::Mixture { spec } => mixture_rows(rng, n, spec)?.0,
        };
        DataMatrix::new(n, d, values)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

impl Aggregate {
    fn of(values: &[f64]) -> Self {
        let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
        if finite.is_empty() {
            return Self {
                mean: f64::NAN,
                median: f64::NAN,
                max: f64::NAN,
            };
        }
        Self {
            mean: finite.iter().sum::<f64>() / finite.len() as f64,
            median: median(&finite).expect("nonempty"),
            max: finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    /// Value of the grouping variable (sample size, contamination fraction, …).
    pub group: f64,
    pub replicate: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub group: f64,
    pub metrics: BTreeMap<String, Aggregate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub experiment: String,
    pub design: String,
    pub seed: u64,
    pub replicates: usize,
    pub group_by: String,
    pub metrics: Vec<String>,
    pub rows: Vec<ReplicateRow>,
    pub summary: Vec<GroupSummary>,
    pub notes: Vec<String>,
}

impl ExperimentResult {
    fn new(experiment: &str, design: String, seed: u64, replicates: usize, group_by: &str, metrics: &[&str]) -> Self {
        Self {
            experiment: experiment.into(),
            design,
            seed,
            replicates,
            group_by: group_by.into(),
            metrics: metrics.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn summarize(&mut self) {
        let mut groups: Vec<f64> = Vec::new();
        for r in &self.rows {
            if !groups.contains(&r.group) {
                groups.push(r.group);
            }
        }
        self.summary = groups
            .into_iter()
            .map(|g| {
                let rows: Vec<&ReplicateRow> = self.rows.iter().filter(|r| r.group == g).collect();
                let metrics = self
                    .metrics
                    .iter()
                    .enumerate()
                    .map(|(j, name)| {
                        (
                            name.clone(),
                            Aggregate::of(&rows.iter().map(|r| r.values[j]).collect::<Vec<_>>()),
                        )
                    })
                    .collect();
                GroupSummary { group: g, metrics }
            })
            .collect();
    }

    /// Every value of `metric` in `group`, in replicate order.
    pub fn values(&self, group: f64, metric: &str) -> Option<Vec<f64>> {
        let j = self.metrics.iter().position(|m| m == metric)?;
        Some(
            self.rows
                .iter()
                .filter(|r| r.group == group)
                .map(|r| r.values[j])
                .collect(),
        )
    }

    pub fn aggregate(&self, group: f64, metric: &str) -> Option<Aggregate> {
        self.summary
            .iter()
            .find(|s| s.group == group)?
            .metrics
            .get(metric)
            .copied()
    }

    /// One row per replicate: `group_by,replicate,metric…`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let err = |e: csv::Error| Error::Csv {
            path: "<output>".into(),
            message: e.to_string(),
        };
        let mut wtr = csv::Writer::from_writer(w);
        let mut header = vec![self.group_by.clone(), "replicate".into()];
        header.extend(self.metrics.iter().cloned());
        wtr.write_record(&header).map_err(err)?;
        for r in &self.rows {
            let mut rec = vec![r.group.to_string(), r.replicate.to_string()];
            rec.extend(r.values.iter().map(f64::to_string));
            wtr.write_record(&rec).map_err(err)?;
        }
        wtr.flush().map_err(|e| Error::Csv {
            path: "<output>".into(),
            message: e.to_string(),
        })
    }

    /// JSON document without the per-replicate rows.
    pub fn summary_json(&self) -> Result<String> {
        let mut doc = serde_json::to_value(self)?;
        if let Some(obj) = doc.as_object_mut() {
            obj.remove("rows");
        }
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

fn run_replicates<F>(replicates: usize, f: F) -> Result<Vec<Vec<ReplicateRow>>>
where
    F: Fn(usize) -> Result<Vec<ReplicateRow>> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..replicates).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..replicates).map(f).collect()
    }
}

fn stream_id(group: usize, replicate: usize) -> u64 {
    ((group as u64) << 32) | replicate as u64
}

const CONSISTENCY_METRICS: [&str; 5] = ["err_phi1", "err_phi2_scale", "err_c_med_diag", "norm_phi3", "norm_phi4"];

/// Estimation error against the population values along an increasing
/// sample-size grid.
///
/// Per replicate: `‖Φ̂₁‖`, `|Φ̂₂^Med − Φ₂^Med|`, the largest comedian
/// diagonal error, `‖Φ̂₃‖` and `‖Φ̂₄‖` (the population location and odd and
/// peripheral moments are zero for the elliptical designs).
pub fn run_consistency(design: &Design, n_grid: &[usize], replicates: usize, seed: u64) -> Result<ExperimentResult> {
    let reference = design.reference()?.ok_or_else(|| {
        Error::InvalidArgument("consistency needs an elliptical design with known population values".into())
    })?;
    if n_grid.is_empty() || n_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "sample-size grid must be nonempty and increasing".into(),
        ));
    }
    if replicates == 0 {
        return Err(Error::InvalidArgument("need at least one replicate".into()));
    }
    let cfg = VMedadConfig::default();
    let mut result = ExperimentResult::new(
        "consistency",
        design.describe(),
        seed,
        replicates,
        "n",
        &CONSISTENCY_METRICS,
    );
    for (g, &n) in n_grid.iter().enumerate() {
        let rows = run_replicates(replicates, |r| {
            let x = design.sample(n, &mut substream(seed, stream_id(g, r)))?;
            let rep = full_report(&x, &cfg)?;
            let c_err = rep
                .c_med
                .diagonal()
                .iter()
                .map(|v| (v - reference.c_med_diag).abs())
                .fold(0.0, f64::max);
            Ok(vec![ReplicateRow {
                group: n as f64,
                replicate: r,
                values: vec![
                    norm(&rep.phi1),
                    (rep.phi2_scale - reference.phi2_scale).abs(),
                    c_err,
                    rep.norms[&3],
                    rep.norms[&4],
                ],
            }])
        })?;
        result.rows.extend(rows.into_iter().flatten());
    }
    result.summarize();
    Ok(result)
}

const BREAKDOWN_METRICS: [&str; 8] = [
    "shift_phi1",
    "rel_change_phi2_scale",
    "rel_change_norm_phi3",
    "rel_change_norm_phi4",
    "abs_change_psi3",
    "abs_change_psi4",
    "ratio_mardia_b1",
    "ratio_mardia_b2",
];

/// Effect of gross contamination on the moments, against the clean sample.
///
/// Per replicate and contamination fraction: the shift of `Φ̂₁` in units of
/// the clean `Φ̂₂^Med`; relative changes `|a − a₀|/|a₀|` of `Φ̂₂^Med`, `‖Φ̂₃‖`
/// and `‖Φ̂₄‖`; the absolute changes `‖Ψ̂ₖ − Ψ̂ₖ⁰‖` of the standardized
/// vectors; and the ratios of Mardia's `b₁` and `b₂` to their clean values.
pub fn run_breakdown(
    design: &Design,
    epsilon_grid: &[f64],
    magnitude: f64,
    replicates: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    if epsilon_grid.is_empty() || replicates == 0 {
        return Err(Error::InvalidArgument(
            "need a nonempty contamination grid and at least one replicate".into(),
        ));
    }
    let n = 2000;
    run_breakdown_n(design, n, epsilon_grid, magnitude, replicates, seed)
}

/// As [`run_breakdown`] with an explicit sample size.
pub fn run_breakdown_n(
    design: &Design,
    n: usize,
    epsilon_grid: &[f64],
    magnitude: f64,
    replicates: usize,
    seed: u64,
) -> Result<ExperimentResult> {
    let cfg = VMedadConfig::default();
    let mut result = ExperimentResult::new(
        "breakdown",
        design.describe(),
        seed,
        replicates,
        "epsilon",
        &BREAKDOWN_METRICS,
    );
    result.notes.push(format!("n = {n}, magnitude = {magnitude}"));
    let per_rep = run_replicates(replicates, |r| {
        let mut rng = substream(seed, stream_id(0, r));
        let x = design.sample(n, &mut rng)?;
        let clean = full_report(&x, &cfg)?;
        let (b1, b2) = mardia(&x, CovDivisor::Sample)?;
        let mut rows = Vec::with_capacity(epsilon_grid.len());
        for (e, &eps) in epsilon_grid.iter().enumerate() {
            let mut crng = substream(seed, stream_id(e + 1, r));
            let (y, _) = contaminate_with(&x, eps, magnitude, None, &mut crng)?;
            let dirty = full_report(&y, &cfg)?;
            let (c1, c2) = mardia(&y, CovDivisor::Sample)?;
            let rel = |a: f64, a0: f64| (a - a0).abs() / a0.abs();
            let diff = |a: &[f64], b: &[f64]| norm(&a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
            let psi_change = |k: usize| match (clean.psi_k(k), dirty.psi_k(k)) {
                (Some(a), Some(b)) => diff(a, b),
                _ => f64::NAN,
            };
            rows.push(ReplicateRow {
                group: eps,
                replicate: r,
                values: vec![
                    diff(&dirty.phi1, &clean.phi1) / clean.phi2_scale,
                    rel(dirty.phi2_scale, clean.phi2_scale),
                    rel(dirty.norms[&3], clean.norms[&3]),
                    dirty.norms.get(&4).map_or(f64::NAN, |v| rel(*v, clean.norms[&4])),
                    psi_change(3),
                    psi_change(4),
                    c1 / b1,
                    c2 / b2,
                ],
            });
        }
        Ok(rows)
    })?;
    // group-major ordering
    for e in 0..epsilon_grid.len() {
        for rows in &per_rep {
            result.rows.push(rows[e].clone());
        }
    }
    result.summarize();
    Ok(result)
}

const EQUIVARIANCE_METRICS: [&str; 7] = [
    "dev_location",
    "dev_vector",
    "dev_scale",
    "dev_psi",
    "max_violation",
    "affine_dev_vector",
    "affine_dev_psi_norm",
];

struct Similarity {
    scale: f64,
    perm: Vec<usize>,
    signs: Vec<f64>,
    shift: Vec<f64>,
}

impl Similarity {
    fn random<R: Rng + ?Sized>(d: usize, spread: f64, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..d).collect();
        for i in (1..d).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let signs = (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let normal = Normal::new(0.0, 10.0 * spread).expect("finite spread");
        let shift = (0..d).map(|_| normal.sample(rng)).collect();
        Self {
            scale,
            perm,
            signs,
            shift,
        }
    }

    /// Row-major `c·Q` with `(Qv)ᵢ = sᵢ·v_{π(i)}`.
    fn matrix(&self) -> Vec<f64> {
        let d = self.perm.len();
        let mut a = vec![0.0; d * d];
        for i in 0..d {
            a[i * d + self.perm[i]] = self.scale * self.signs[i];
        }
        a
    }

    fn signed_perm(&self, v: &[f64]) -> Vec<f64> {
        (0..v.len()).map(|i| self.signs[i] * v[self.perm[i]]).collect()
    }
}

fn mat_vec(a: &[f64], v: &[f64]) -> Vec<f64> {
    let d = v.len();
    (0..d).map(|i| (0..d).map(|j| a[i * d + j] * v[j]).sum()).collect()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    norm(&a.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>())
}

fn moment_vectors(r: &VMedadReport) -> Vec<(usize, &[f64])> {
    std::iter::once((2, r.phi2_vec.as_slice()))
        .chain(r.phi.iter().map(|(&k, v)| (k, v.as_slice())))
        .collect()
}

/// Largest deviation from the equivariance identities under `x ↦ c·Q·x + t`,
/// with deviations of location and vector moments measured in units of
/// `c·Φ̂₂^Med(X)`.
fn similarity_deviation(base: &VMedadReport, y: &VMedadReport, t: &Similarity) -> [f64; 4] {
    let unit = t.scale * base.phi2_scale;
    let a = t.matrix();
    let expect_loc: Vec<f64> = mat_vec(&a, &base.phi1)
        .iter()
        .zip(&t.shift)
        .map(|(p, q)| p + q)
        .collect();
    let dev_location = dist(&y.phi1, &expect_loc) / unit;
    let dev_vector = moment_vectors(base)
        .into_iter()
        .zip(moment_vectors(y))
        .map(|((_, bx), (_, by))| dist(by, &mat_vec(&a, bx)) / unit)
        .fold(0.0, f64::max);
    let dev_scale = (y.phi2_scale - unit).abs() / unit;
    let dev_psi = match (&base.psi, &y.psi) {
        (Some(px), Some(py)) => px
            .iter()
            .map(|(k, v)| dist(&py[k], &t.signed_perm(v)))
            .fold(0.0, f64::max),
        _ => f64::NAN,
    };
    [dev_location, dev_vector, dev_scale, dev_psi]
}

/// Checks the equivariance identities on `trials` random maps from the exact
/// group (translation, signed permutation, uniform scale), and logs the
/// deviation of `Φₖ(AX) = A·Φₖ(X)` and of `‖Ψₖ‖` under random full-rank
/// affine maps alongside.
pub fn run_equivariance_check(x: &DataMatrix, trials: usize, seed: u64) -> Result<ExperimentResult> {
    let cfg = VMedadConfig {
        median_tol: 1e-15,
        median_max_iter: 100_000,
        ..Default::default()
    };
    run_equivariance_with(x, trials, seed, &cfg)
}

pub fn run_equivariance_with(x: &DataMatrix, trials: usize, seed: u64, cfg: &VMedadConfig) -> Result<ExperimentResult> {
    let d = x.ncols();
    let base = full_report(x, cfg)?;
    if !(base.phi2_scale > 0.0) {
        return Err(Error::DegenerateScale);
    }
    let mut result = ExperimentResult::new(
        "equivariance",
        format!("n = {}, d = {d}", x.nrows()),
        seed,
        trials,
        "trial_set",
        &EQUIVARIANCE_METRICS,
    );
    let rows = run_replicates(trials, |r| {
        let mut rng = substream(seed, stream_id(0, r));
        let sim = Similarity::random(d, base.phi2_scale + norm(&base.phi1), &mut rng);
        let y = x.affine(&sim.matrix(), &sim.shift)?;
        let ry = full_report(&y, cfg)?;
        let devs = similarity_deviation(&base, &ry, &sim);
        let max_violation = devs.iter().copied().fold(0.0, f64::max);

        let a = loop {
            let a: Vec<f64> = (0..d * d).map(|_| rng.sample(StandardNormal)).collect();
            let m = nalgebra::DMatrix::from_row_slice(d, d, &a);
            let sv = m.singular_values();
            if sv.min() > 0.0 && sv.max() / sv.min() < 100.0 {
                break a;
            }
        };
        let z = x.affine(&a, &vec![0.0; d])?;
        let rz = full_report(&z, cfg)?;
        let a_norm = nalgebra::DMatrix::from_row_slice(d, d, &a).norm();
        let affine_dev_vector = moment_vectors(&base)
            .into_iter()
            .zip(moment_vectors(&rz))
            .map(|((_, bx), (_, bz))| dist(bz, &mat_vec(&a, bx)) / (a_norm * base.phi2_scale))
            .fold(0.0, f64::max);
        let affine_dev_psi_norm = match (&base.psi_norms, &rz.psi_norms) {
            (Some(px), Some(pz)) => px.iter().map(|(k, v)| (pz[k] - v).abs()).fold(0.0, f64::max),
            _ => f64::NAN,
        };
        Ok(vec![ReplicateRow {
            group: 0.0,
            replicate: r,
            values: vec![
                devs[0],
                devs[1],
                devs[2],
                devs[3],
                max_violation,
                affine_dev_vector,
                affine_dev_psi_norm,
            ],
        }])
    })?;
    result.rows = rows.into_iter().flatten().collect();
    result.summarize();
    result
        .notes
        .push("affine_dev_* columns are logged only; the identities are exact for the similarity group".into());
    Ok(result)
}

/// Mixture sample with its shell labels and the arrows drawn in the example
/// figure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure1Record {
    pub seed: u64,
    pub points: DataMatrix,
    /// Two-shell (skewness) partition, shell 0 innermost.
    pub shell: Vec<usize>,
    pub median: Vec<f64>,
    pub phi3: Vec<f64>,
    pub phi4: Vec<f64>,
    pub gamma2: Vec<f64>,
    /// Angles in degrees to the inter-cluster direction `(1,1)/√2`.
    pub angle_phi3: f64,
    pub angle_gamma2: f64,
}

impl Figure1Record {
    /// Scatter block `x1,x2,shell`, a blank line, then an `arrow,x0,y0,dx,dy`
    /// block with arrows anchored at the spatial median.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let io = |e: std::io::Error| Error::Io {
            path: "<output>".into(),
            source: e,
        };
        writeln!(w, "x1,x2,shell").map_err(io)?;
        for (r, s) in self.points.rows().zip(&self.shell) {
            writeln!(w, "{},{},{}", r[0], r[1], s).map_err(io)?;
        }
        writeln!(w).map_err(io)?;
        writeln!(w, "arrow,x0,y0,dx,dy").map_err(io)?;
        for (name, v) in [("phi3", &self.phi3), ("phi4", &self.phi4), ("gamma2", &self.gamma2)] {
            writeln!(w, "{name},{},{},{},{}", self.median[0], self.median[1], v[0], v[1]).map_err(io)?;
        }
        Ok(())
    }
}

/// The two-dimensional asymmetric normal mixture example for one seed.
pub fn run_figure1(seed: u64) -> Result<Figure1Record> {
    let spec = MixtureSpec::asymmetric_example();
    let x = super::sample_mixture(500, &spec, seed)?;
    let a = analyze(&x, &VMedadConfig::default())?;
    let shells = assign_shells(&a.depths, 2, ShellOrder::CenterOut)?;
    let gamma2 = mrsz_skew(&x, CovDivisor::Sample)?;
    let diag = [1.0, 1.0];
    let phi3 = a.report.phi3().to_vec();
    Ok(Figure1Record {
        seed,
        angle_phi3: super::angle_deg(&phi3, &diag),
        angle_gamma2: super::angle_deg(&gamma2, &diag),
        shell: shells.shell_of,
        median: a.report.phi1.clone(),
        phi4: a.report.phi4().map(<[f64]>::to_vec).unwrap_or_default(),
        phi3,
        gamma2,
        points: x,
    })
}
