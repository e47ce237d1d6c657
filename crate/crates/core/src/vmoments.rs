//! The VMedAD vector moment system.
//!
//! For shell count `b`, `Φ_{b+1} = Σ_a (−1)^{a+1} Med{uᵢ : i ∈ S_a}` where the
//! median is coordinate-wise over the shell members only and `uᵢ = xᵢ − M̂`.
//! Each order uses its own shell partition of the same depth values.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::depth::{assign_shells, spatial_depth_scaled, DepthProfile, DepthScaling, ShellOrder};
use crate::geometry::{
    center, comedian_matrix, coordwise_median, coordwise_median_of, medad_scale, spatial_median, CenterEstimate,
    ComedianMatrix, DEFAULT_MAX_ITER, DEFAULT_TOL,
};
use crate::{norm, DataMatrix, Error, Result};

/// Alternating sum of shellwise coordinate medians for a profile with `b` shells.
pub fn vector_moment(u: &DataMatrix, profile: &DepthProfile, b: usize) -> Result<Vec<f64>> {
    if profile.b != b {
        return Err(Error::ShellMismatch {
            profile: profile.b,
            requested: b,
        });
    }
    if profile.len() != u.nrows() {
        return Err(Error::DimensionMismatch {
            expected: u.nrows(),
            found: profile.len(),
        });
    }
    Ok(shell_medians(u, profile)?
        .iter()
        .enumerate()
        .fold(vec![0.0; u.ncols()], |mut acc, (a, med)| {
            let sign = if a % 2 == 0 { -1.0 } else { 1.0 };
            for (s, m) in acc.iter_mut().zip(med) {
                *s += sign * m;
            }
            acc
        }))
}

/// Coordinate-wise median of each shell, indexed by shell.
pub fn shell_medians(u: &DataMatrix, profile: &DepthProfile) -> Result<Vec<Vec<f64>>> {
    profile
        .shells()
        .iter()
        .enumerate()
        .map(|(a, members)| {
            if members.is_empty() {
                Err(Error::EmptyShell(a))
            } else {
                Ok(coordwise_median_of(u, members))
            }
        })
        .collect()
}

/// `Φ₃ = Med(S₁) − Med(S₀)` from a two-shell profile.
pub fn skewness_vector(u: &DataMatrix, profile_b2: &DepthProfile) -> Result<Vec<f64>> {
    vector_moment(u, profile_b2, 2)
}

/// `Φ₄ = −Med(S₀) + Med(S₁) − Med(S₂)` from a three-shell profile.
pub fn peripheral_vector(u: &DataMatrix, profile_b3: &DepthProfile) -> Result<Vec<f64>> {
    vector_moment(u, profile_b3, 3)
}

/// Componentwise `Φₖ / scale`.
pub fn standardized(phi_k: &[f64], scale: f64) -> Result<Vec<f64>> {
    if !(scale > 0.0) {
        return Err(Error::DegenerateScale);
    }
    Ok(phi_k.iter().map(|v| v / scale).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VMedadConfig {
    /// Highest shell count; moments up to `Φ_{b_max+1}` are produced.
    pub b_max: usize,
    pub shell_order: ShellOrder,
    pub depth_scaling: DepthScaling,
    pub median_tol: f64,
    pub median_max_iter: usize,
}

impl Default for VMedadConfig {
    fn default() -> Self {
        Self {
            b_max: 3,
            shell_order: ShellOrder::CenterOut,
            depth_scaling: DepthScaling::Covariance,
            median_tol: DEFAULT_TOL,
            median_max_iter: DEFAULT_MAX_ITER,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VMedadReport {
    pub n: usize,
    pub d: usize,
    pub b_max: usize,
    pub shell_order: ShellOrder,
    /// Scaling actually used for depth (may differ from the request when the
    /// covariance is singular).
    pub depth_scaling: DepthScaling,
    pub center: CenterEstimate,
    /// `Φ₁ = M̂`.
    pub phi1: Vec<f64>,
    /// `Φ₂ = Med(uᵢ)`, coordinate-wise.
    pub phi2_vec: Vec<f64>,
    /// `Φ₂^Med = Med(‖uᵢ‖²)^{1/2}`.
    pub phi2_scale: f64,
    pub c_med: ComedianMatrix,
    pub c_med_trace: f64,
    /// `Φₖ` for `k = 3..=b_max+1`.
    pub phi: BTreeMap<usize, Vec<f64>>,
    /// `Ψₖ = Φₖ / Φ₂^Med` for `k = 2..=b_max+1`; `None` when the scale is zero.
    pub psi: Option<BTreeMap<usize, Vec<f64>>>,
    /// `‖Φₖ‖` for `k = 2..=b_max+1` (`k = 2` is the norm of `phi2_vec`).
    pub norms: BTreeMap<usize, f64>,
    /// `‖Ψₖ‖` when `psi` is defined.
    pub psi_norms: Option<BTreeMap<usize, f64>>,
    /// Unit direction `Φ₂ / ‖Φ₂‖`, defined when `‖Φ₂‖ > 1e−8·Φ₂^Med`.
    pub phi2_direction: Option<Vec<f64>>,
}

impl VMedadReport {
    pub fn phi3(&self) -> &[f64] {
        &self.phi[&3]
    }

    pub fn phi4(&self) -> Option<&[f64]> {
        self.phi.get(&4).map(Vec::as_slice)
    }

    pub fn psi_k(&self, k: usize) -> Option<&[f64]> {
        self.psi.as_ref()?.get(&k).map(Vec::as_slice)
    }
}

/// Intermediate products of a full analysis, kept for diagnostics.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: VMedadReport,
    pub centered: DataMatrix,
    pub depths: Vec<f64>,
}

pub fn analyze(x: &DataMatrix, config: &VMedadConfig) -> Result<Analysis> {
    if config.b_max < 2 {
        return Err(Error::InvalidArgument(format!(
            "b_max must be ≥ 2, got {}",
            config.b_max
        )));
    }
    let n = x.nrows();
    if n < config.b_max || n < 2 {
        return Err(Error::TooFewForShells { n, b: config.b_max });
    }
    let center_est = spatial_median(x, config.median_tol, config.median_max_iter)?;
    let u = center(x, &center_est.m)?;
    let phi2_vec = coordwise_median(&u)?;
    let phi2_scale = medad_scale(&u)?;
    let c_med = comedian_matrix(&u)?;
    let (depths, depth_scaling) = spatial_depth_scaled(x, config.depth_scaling)?;

    let mut phi = BTreeMap::new();
    let mut norms = BTreeMap::new();
    norms.insert(2, norm(&phi2_vec));
    for b in 2..=config.b_max {
        let profile = assign_shells(&depths, b, config.shell_order)?;
        let v = vector_moment(&u, &profile, b)?;
        norms.insert(b + 1, norm(&v));
        phi.insert(b + 1, v);
    }

    let (psi, psi_norms) = if phi2_scale > 0.0 {
        let mut psi = BTreeMap::new();
        psi.insert(2, standardized(&phi2_vec, phi2_scale)?);
        for (&k, v) in &phi {
            psi.insert(k, standardized(v, phi2_scale)?);
        }
        let psi_norms = psi.iter().map(|(&k, v)| (k, norm(v))).collect();
        (Some(psi), Some(psi_norms))
    } else {
        (None, None)
    };

    let phi2_norm = norms[&2];
    let phi2_direction =
        (phi2_norm > 1e-8 * phi2_scale && phi2_norm > 0.0).then(|| phi2_vec.iter().map(|v| v / phi2_norm).collect());

    let report = VMedadReport {
        n,
        d: x.ncols(),
        b_max: config.b_max,
        shell_order: config.shell_order,
        depth_scaling,
        phi1: center_est.m.clone(),
        center: center_est,
        phi2_vec,
        phi2_scale,
        c_med_trace: c_med.trace(),
        c_med,
        phi,
        psi,
        norms,
        psi_norms,
        phi2_direction,
    };
    Ok(Analysis {
        report,
        centered: u,
        depths,
    })
}

/// Location, scale, comedian matrix, depth shells and all vector moments up
/// to order `b_max + 1`.
pub fn full_report(x: &DataMatrix, config: &VMedadConfig) -> Result<VMedadReport> {
    analyze(x, config).map(|a| a.report)
}
