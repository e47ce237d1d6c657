//! Sample spatial depth and depth shells.
//!
//! The depth of `xᵢ` is `1 − ‖(1/n) Σⱼ (xⱼ − xᵢ)/‖xⱼ − xᵢ‖‖`, where the
//! self term and exact duplicates contribute the zero vector. By default the
//! sample is first whitened with the inverse Cholesky factor of its
//! covariance matrix, which makes the depth ordering invariant under every
//! nonsingular affine map. Any whitening matrix `W` with `WᵀW = S⁻¹` gives
//! the same depths, since they differ by an orthogonal factor.

use serde::{Deserialize, Serialize};

use crate::medstats::{block_of_rank, stable_order};
use crate::{DataMatrix, Error, Result};

/// How the sample is standardized before depth is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthScaling {
    /// Whiten by the sample covariance (affine-invariant spatial depth).
    #[default]
    Covariance,
    /// Plain Euclidean spatial depth.
    None,
}

impl std::str::FromStr for DepthScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "covariance" => Ok(Self::Covariance),
            "none" | "euclidean" => Ok(Self::None),
            other => Err(Error::InvalidArgument(format!("unknown depth scaling {other:?}"))),
        }
    }
}

/// Which end of the depth ranking gets shell index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShellOrder {
    /// Shell 0 holds the deepest (innermost) observations.
    #[default]
    CenterOut,
    /// Shell 0 holds the least deep (outermost) observations.
    DepthAscending,
}

impl std::str::FromStr for ShellOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "center-out" | "center_out" => Ok(Self::CenterOut),
            "depth-ascending" | "depth_ascending" => Ok(Self::DepthAscending),
            other => Err(Error::InvalidArgument(format!("unknown shell order {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DepthProfile {
    pub depths: Vec<f64>,
    /// 1-based rank of each observation in ascending depth, ties by position.
    pub ranks: Vec<usize>,
    pub shell_of: Vec<usize>,
    pub b: usize,
    pub order: ShellOrder,
}

impl DepthProfile {
    pub fn len(&self) -> usize {
        self.depths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depths.is_empty()
    }

    /// Members of each shell, in ascending position order.
    pub fn shells(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.b];
        for (i, &s) in self.shell_of.iter().enumerate() {
            out[s].push(i);
        }
        out
    }

    pub fn shell_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.b];
        for &s in &self.shell_of {
            sizes[s] += 1;
        }
        sizes
    }
}

fn depth_of(x: &DataMatrix, i: usize) -> f64 {
    let d = x.ncols();
    let xi = x.row(i);
    let mut acc = vec![0.0; d];
    let mut diff = vec![0.0; d];
    for (j, xj) in x.rows().enumerate() {
        if j == i {
            continue;
        }
        let mut sq = 0.0;
        for k in 0..d {
            diff[k] = xj[k] - xi[k];
            sq += diff[k] * diff[k];
        }
        if sq == 0.0 {
            continue;
        }
        let inv = 1.0 / sq.sqrt();
        for k in 0..d {
            acc[k] += diff[k] * inv;
        }
    }
    let n = x.nrows() as f64;
    let mean_norm = acc.iter().map(|v| (v / n) * (v / n)).sum::<f64>().sqrt();
    (1.0 - mean_norm).clamp(0.0, 1.0)
}

/// Euclidean sample spatial depth of every observation. `O(n²·d)`.
pub fn spatial_depth_all(x: &DataMatrix) -> Result<Vec<f64>> {
    if x.nrows() < 2 {
        return Err(Error::DepthUndefined);
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..x.nrows()).into_par_iter().map(|i| depth_of(x, i)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..x.nrows()).map(|i| depth_of(x, i)).collect())
    }
}

/// Rows of `x` mapped through `L⁻¹`, where `LLᵀ` is the sample covariance.
///
/// Returns `None` when the covariance is singular.
pub fn whiten(x: &DataMatrix) -> Option<DataMatrix> {
    let cov = crate::baselines::covariance(x, crate::CovDivisor::Sample).ok()?;
    let chol = nalgebra::Cholesky::new(cov)?;
    let l = chol.l();
    let n = x.nrows();
    let d = x.ncols();
    let mut values = Vec::with_capacity(n * d);
    let mut y = vec![0.0; d];
    for row in x.rows() {
        // forward substitution
        for k in 0..d {
            let mut s = row[k];
            for j in 0..k {
                s -= l[(k, j)] * y[j];
            }
            y[k] = s / l[(k, k)];
        }
        values.extend_from_slice(&y);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return None;
    }
    DataMatrix::new(n, d, values).ok()
}

/// Spatial depth under the requested scaling.
///
/// Also returns the scaling actually applied: a singular covariance falls
/// back to Euclidean depth.
pub fn spatial_depth_scaled(x: &DataMatrix, scaling: DepthScaling) -> Result<(Vec<f64>, DepthScaling)> {
    if x.nrows() < 2 {
        return Err(Error::DepthUndefined);
    }
    match scaling {
        DepthScaling::None => Ok((spatial_depth_all(x)?, DepthScaling::None)),
        DepthScaling::Covariance => match whiten(x) {
            Some(w) => Ok((spatial_depth_all(&w)?, DepthScaling::Covariance)),
            None => Ok((spatial_depth_all(x)?, DepthScaling::None)),
        },
    }
}

/// Splits observations into `b` equal-count shells by depth rank.
pub fn assign_shells(depths: &[f64], b: usize, order: ShellOrder) -> Result<DepthProfile> {
    if b < 2 {
        return Err(Error::InvalidArgument(format!("shell count must be ≥ 2, got {b}")));
    }
    let n = depths.len();
    if n < b {
        return Err(Error::TooFewForShells { n, b });
    }
    if let Some(pos) = depths.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    let mut ranks = vec![0; n];
    let mut shell_of = vec![0; n];
    for (r, &i) in stable_order(depths).iter().enumerate() {
        let ascending = block_of_rank(r + 1, b, n);
        ranks[i] = r + 1;
        shell_of[i] = match order {
            ShellOrder::DepthAscending => ascending,
            ShellOrder::CenterOut => b - 1 - ascending,
        };
    }
    Ok(DepthProfile {
        depths: depths.to_vec(),
        ranks,
        shell_of,
        b,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn dm(rows: &[&[f64]]) -> DataMatrix {
        DataMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn two_points() {
        let d = spatial_depth_all(&dm(&[&[0.0, 0.0], &[3.0, 4.0]])).unwrap();
        assert!((d[0] - 0.5).abs() < 1e-15 && (d[1] - 0.5).abs() < 1e-15, "{d:?}");
    }

    #[test]
    fn symmetric_center_has_depth_one() {
        let (c, v, w) = ([2.0, -1.0], [1.0, 0.5], [-0.3, 2.0]);
        let x = dm(&[
            &c,
            &[c[0] + v[0], c[1] + v[1]],
            &[c[0] - v[0], c[1] - v[1]],
            &[c[0] + w[0], c[1] + w[1]],
            &[c[0] - w[0], c[1] - w[1]],
        ]);
        let d = spatial_depth_all(&x).unwrap();
        assert!((d[0] - 1.0).abs() < 1e-15);
        assert!(d.iter().all(|&v| v <= d[0]));
    }

    #[test]
    fn remote_point_has_low_depth() {
        let mut rows: Vec<Vec<f64>> = (0..50).map(|i| vec![(i % 7) as f64, (i % 5) as f64]).collect();
        rows.push(vec![1e6, 1e6]);
        let d = spatial_depth_all(&DataMatrix::from_rows(&rows).unwrap()).unwrap();
        // averaged unit vectors nearly align: depth ≈ 1/n
        assert!(d[50] < 1.0 / 51.0 + 1e-6, "{}", d[50]);
    }

    #[test]
    fn duplicates_contribute_nothing() {
        let d = spatial_depth_all(&dm(&[&[1.0], &[1.0], &[1.0]])).unwrap();
        assert_eq!(d, vec![1.0, 1.0, 1.0]);
        assert!(matches!(
            spatial_depth_all(&dm(&[&[1.0, 2.0]])),
            Err(Error::DepthUndefined)
        ));
    }

    #[test]
    fn singular_covariance_falls_back() {
        let x = dm(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0]]);
        let (d, used) = spatial_depth_scaled(&x, DepthScaling::Covariance).unwrap();
        assert_eq!(used, DepthScaling::None);
        assert_eq!(d, spatial_depth_all(&x).unwrap());
    }

    #[test]
    fn shell_examples() {
        let depths = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6];
        let asc = assign_shells(&depths, 2, ShellOrder::DepthAscending).unwrap();
        assert_eq!(asc.shell_of, vec![0, 0, 0, 1, 1, 1]);
        let co = assign_shells(&depths, 2, ShellOrder::CenterOut).unwrap();
        assert_eq!(co.shell_of, vec![1, 1, 1, 0, 0, 0]);
        let seven = [0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1];
        let p = assign_shells(&seven, 3, ShellOrder::CenterOut).unwrap();
        assert_eq!(p.shell_sizes(), vec![3, 2, 2]);
        assert_eq!(p.ranks, vec![7, 6, 5, 4, 3, 2, 1]);
        assert!(matches!(
            assign_shells(&[0.1, 0.2], 3, ShellOrder::CenterOut),
            Err(Error::TooFewForShells { n: 2, b: 3 })
        ));
    }

    #[test]
    fn depth_ties_broken_by_position() {
        let p = assign_shells(&[0.5; 4], 2, ShellOrder::DepthAscending).unwrap();
        assert_eq!(p.shell_of, vec![0, 0, 1, 1]);
        assert_eq!(p.ranks, vec![1, 2, 3, 4]);
    }

    fn cloud() -> impl Strategy<Value = Vec<[f64; 2]>> {
        prop::collection::vec(prop::array::uniform2(-20.0..20.0f64), 4..40)
    }

    fn ranks_of(d: &[f64]) -> Vec<usize> {
        assign_shells(d, 2, ShellOrder::DepthAscending).unwrap().ranks
    }

    fn min_gap(d: &[f64]) -> f64 {
        let mut s = d.to_vec();
        s.sort_by(f64::total_cmp);
        s.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn depth_similarity_invariance(
            pts in cloud(), theta in 0.0..6.3f64, c in 0.1..10.0f64,
            t in prop::array::uniform2(-100.0..100.0f64),
        ) {
            let x = DataMatrix::from_rows(&pts).unwrap();
            let (s, co) = theta.sin_cos();
            let y = x.affine(&[c * co, -c * s, c * s, c * co], &t).unwrap();
            for scaling in [DepthScaling::None, DepthScaling::Covariance] {
                let (dx, _) = spatial_depth_scaled(&x, scaling).unwrap();
                let (dy, _) = spatial_depth_scaled(&y, scaling).unwrap();
                for (a, b) in dx.iter().zip(&dy) {
                    prop_assert!((a - b).abs() < 1e-12, "{a} vs {b}");
                    prop_assert!((0.0..=1.0).contains(a));
                }
                if min_gap(&dx) > 1e-9 {
                    prop_assert_eq!(ranks_of(&dx), ranks_of(&dy));
                }
            }
        }

        #[test]
        fn whitened_depth_affine_invariance(
            pts in cloud(), a in prop::array::uniform4(-3.0..3.0f64),
            t in prop::array::uniform2(-10.0..10.0f64),
        ) {
            let det = a[0] * a[3] - a[1] * a[2];
            prop_assume!(det.abs() > 0.3);
            let x = DataMatrix::from_rows(&pts).unwrap();
            let y = x.affine(&a, &t).unwrap();
            let (dx, ux) = spatial_depth_scaled(&x, DepthScaling::Covariance).unwrap();
            let (dy, uy) = spatial_depth_scaled(&y, DepthScaling::Covariance).unwrap();
            prop_assume!(ux == DepthScaling::Covariance && uy == DepthScaling::Covariance);
            for (p, q) in dx.iter().zip(&dy) {
                prop_assert!((p - q).abs() < 1e-9, "{p} vs {q}");
            }
        }

        #[test]
        fn shell_orders_are_reverses(d in prop::collection::vec(0.0..1.0f64, 2..80), b in 2usize..7) {
            prop_assume!(d.len() >= b);
            let co = assign_shells(&d, b, ShellOrder::CenterOut).unwrap();
            let asc = assign_shells(&d, b, ShellOrder::DepthAscending).unwrap();
            for i in 0..d.len() {
                prop_assert_eq!(co.shell_of[i], b - 1 - asc.shell_of[i]);
            }
            let sizes = co.shell_sizes();
            prop_assert!(sizes.iter().all(|&s| s >= 1));
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
            // shell 0 is innermost under center-out
            let inner_min = co.shells()[0].iter().map(|&i| d[i]).fold(f64::INFINITY, f64::min);
            let rest_max = (1..b).flat_map(|s| co.shells()[s].clone()).map(|i| d[i]).fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(inner_min >= rest_max);
        }
    }
}
