//! Univariate median primitives and the MedAD moment system.
//!
//! For even sample sizes the median is the mean of the two middle order
//! statistics. Quantile slices are formed from the ascending order with ties
//! broken by original position; the observation of rank `r` (1-based) lands
//! in slice `ceil(r·b/n) − 1`. Slice medians are conditional: they are taken
//! over the members of the slice only.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Median with the even-n midpoint convention.
pub fn median(values: &[f64]) -> Result<f64> {
    check(values)?;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(median_of_sorted(&sorted))
}

/// Median of an already sorted, nonempty slice.
pub(crate) fn median_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Median that reorders its input in place.
pub(crate) fn median_in_place(values: &mut [f64]) -> f64 {
    values.sort_unstable_by(f64::total_cmp);
    median_of_sorted(values)
}

fn check(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    Ok(())
}

/// `Med|X − M|`, the median absolute deviation about the sample median.
pub fn mad_about_median(values: &[f64]) -> Result<f64> {
    let m = median(values)?;
    let mut dev: Vec<f64> = values.iter().map(|x| (x - m).abs()).collect();
    Ok(median_in_place(&mut dev))
}

/// Slice index (0-based) of the observation with ascending rank `rank` (1-based).
#[inline]
pub(crate) fn block_of_rank(rank: usize, b: usize, n: usize) -> usize {
    (rank * b).div_ceil(n) - 1
}

/// Ascending order of positions, ties broken by position.
pub(crate) fn stable_order(keys: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..keys.len()).collect();
    order.sort_by(|&i, &j| keys[i].total_cmp(&keys[j]).then(i.cmp(&j)));
    order
}

/// Partitions the sample into `b` contiguous quantile slices.
///
/// Returns one list of original positions per slice, each list in ascending
/// value order.
pub fn quantile_slices(values: &[f64], b: usize) -> Result<Vec<Vec<usize>>> {
    check(values)?;
    if b < 2 {
        return Err(Error::InvalidArgument(format!("slice count must be ≥ 2, got {b}")));
    }
    let n = values.len();
    if n < b {
        return Err(Error::TooFewForSlices { n, b });
    }
    let mut slices = vec![Vec::new(); b];
    for (r, &i) in stable_order(values).iter().enumerate() {
        slices[block_of_rank(r + 1, b, n)].push(i);
    }
    Ok(slices)
}

/// The `(b+1)`-th MedAD moment `Φ_{b+1}`.
///
/// `b = 0` is the median, `b = 1` the MAD, and `b ≥ 2` the alternating sum
/// `Σ_a (−1)^{a+1} Med{|x − M| : x in slice a}`.
pub fn uni_medad_moment(values: &[f64], b: usize) -> Result<f64> {
    match b {
        0 => median(values),
        1 => mad_about_median(values),
        _ => {
            let m = median(values)?;
            let slices = quantile_slices(values, b)?;
            let mut total = 0.0;
            for (a, members) in slices.iter().enumerate() {
                let mut dev: Vec<f64> = members.iter().map(|&i| (values[i] - m).abs()).collect();
                let med = median_in_place(&mut dev);
                if a % 2 == 0 {
                    total -= med;
                } else {
                    total += med;
                }
            }
            Ok(total)
        }
    }
}

/// `Ψ_{b+1} = Φ_{b+1} / Φ₂`.
pub fn uni_standardized(values: &[f64], b: usize) -> Result<f64> {
    if b < 2 {
        return Err(Error::InvalidArgument(format!(
            "standardized order needs b ≥ 2, got {b}"
        )));
    }
    let scale = mad_about_median(values)?;
    if scale <= 0.0 {
        return Err(Error::DegenerateScale);
    }
    Ok(uni_medad_moment(values, b)? / scale)
}

/// Median, `Φ_k` for `k = 2..=b_max+1` and `Ψ_k` for `k = 3..=b_max+1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniMedadMoments {
    pub m: f64,
    pub phi: BTreeMap<usize, f64>,
    /// Empty when the MAD is zero.
    pub psi: BTreeMap<usize, f64>,
}

pub fn uni_moments(values: &[f64], b_max: usize) -> Result<UniMedadMoments> {
    let m = median(values)?;
    let mut phi = BTreeMap::new();
    for b in 1..=b_max {
        phi.insert(b + 1, uni_medad_moment(values, b)?);
    }
    let mut psi = BTreeMap::new();
    if let Some(&scale) = phi.get(&2) {
        if scale > 0.0 {
            for (&k, &v) in phi.range(3..) {
                psi.insert(k, v / scale);
            }
        }
    }
    Ok(UniMedadMoments { m, phi, psi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn median_examples() {
        assert_eq!(median(&[1.0, 2.0, 100.0]).unwrap(), 2.0);
        assert_eq!(median(&[1.0, 2.0, 3.0, 4.0]).unwrap(), 2.5);
        assert_eq!(median(&[5.0]).unwrap(), 5.0);
        assert!(matches!(median(&[]), Err(Error::EmptySample)));
        assert!(matches!(median(&[1.0, f64::NAN]), Err(Error::NonFinite(1))));
    }

    #[test]
    fn mad_examples() {
        assert_eq!(mad_about_median(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(mad_about_median(&[3.3, 3.3, 3.3]).unwrap(), 0.0);
        assert_eq!(mad_about_median(&[-2.0, -1.0, 1.0, 2.0]).unwrap(), 1.5);
        assert!(mad_about_median(&[]).is_err());
    }

    fn sizes(slices: &[Vec<usize>]) -> Vec<usize> {
        slices.iter().map(Vec::len).collect()
    }

    #[test]
    fn slice_examples() {
        let six = [6.0, 1.0, 5.0, 2.0, 4.0, 3.0];
        let s = quantile_slices(&six, 2).unwrap();
        // ranks {1,2,3} hold values 1,2,3 at positions 1,3,5
        assert_eq!(s, vec![vec![1, 3, 5], vec![4, 2, 0]]);
        assert_eq!(sizes(&quantile_slices(&[0.0; 7], 2).unwrap()), vec![3, 4]);
        assert_eq!(sizes(&quantile_slices(&six, 3).unwrap()), vec![2, 2, 2]);
        assert!(matches!(
            quantile_slices(&[1.0, 2.0], 3),
            Err(Error::TooFewForSlices { n: 2, b: 3 })
        ));
    }

    #[test]
    fn ties_split_by_position() {
        let s = quantile_slices(&[1.0, 1.0, 1.0, 1.0], 2).unwrap();
        assert_eq!(s, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn moment_examples() {
        assert_eq!(uni_medad_moment(&[-2.0, -1.0, 1.0, 2.0], 2).unwrap(), 0.0);
        assert_eq!(uni_medad_moment(&[4.0, -1.0, 9.0], 0).unwrap(), 4.0);
        // M = 0; slices {0,0} and {0,10}; slice medians of |x| are 0 and 5
        assert_eq!(uni_medad_moment(&[0.0, 0.0, 0.0, 10.0], 2).unwrap(), 5.0);
        assert!(uni_medad_moment(&[1.0, 2.0], 3).is_err());
    }

    #[test]
    fn fourth_moment_by_hand() {
        // sorted 1..9, M = 5, slices {1,2,3} {4,5,6} {7,8,9}
        // deviations {4,3,2} {1,0,1} {2,3,4} → medians 3, 1, 3
        let x: Vec<f64> = (1..=9).map(f64::from).collect();
        assert_eq!(uni_medad_moment(&x, 3).unwrap(), -3.0 + 1.0 - 3.0);
    }

    #[test]
    fn standardized_examples() {
        assert_eq!(uni_standardized(&[-2.0, -1.0, 1.0, 2.0], 2).unwrap(), 0.0);
        assert!(matches!(
            uni_standardized(&[1.0, 1.0, 1.0], 2),
            Err(Error::DegenerateScale)
        ));
        let x = [0.3, 1.7, 2.2, 5.9, 0.1, 8.4, 3.3, 2.9];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 7.0).collect();
        let a = uni_standardized(&x, 2).unwrap();
        let b = uni_standardized(&y, 2).unwrap();
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        assert!(a != 0.0);
    }

    #[test]
    fn standardized_skew_near_zero_for_normal() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let x: Vec<f64> = (0..200_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let psi3 = uni_standardized(&x, 2).unwrap();
        assert!(psi3.abs() < 0.02, "{psi3}");
    }

    #[test]
    fn uni_moments_bundle() {
        let x: Vec<f64> = (1..=9).map(f64::from).collect();
        let m = uni_moments(&x, 3).unwrap();
        assert_eq!(m.m, 5.0);
        assert_eq!(m.phi[&2], 2.0);
        assert_eq!(m.phi[&4], -5.0);
        assert_eq!(m.psi[&4], -2.5);
        assert!(!m.psi.contains_key(&2));
    }

    fn sample() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e3..1e3f64, 1..40)
    }

    proptest! {
        #[test]
        fn median_translation(x in sample(), t in -1e3..1e3f64) {
            let shifted: Vec<f64> = x.iter().map(|v| v + t).collect();
            let lhs = median(&shifted).unwrap();
            let rhs = median(&x).unwrap() + t;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs() + t.abs()));
        }

        #[test]
        fn mad_equivariance(x in sample(), t in -1e3..1e3f64, s in -10.0..10.0f64) {
            let mad = mad_about_median(&x).unwrap();
            let shifted: Vec<f64> = x.iter().map(|v| v + t).collect();
            let scaled: Vec<f64> = x.iter().map(|v| s * v).collect();
            let tol = 1e-9 * (1.0 + mad + t.abs());
            prop_assert!((mad_about_median(&shifted).unwrap() - mad).abs() <= tol);
            prop_assert!((mad_about_median(&scaled).unwrap() - s.abs() * mad).abs() <= 1e-9 * (1.0 + mad) * (1.0 + s.abs()));
        }

        #[test]
        fn slices_partition(x in prop::collection::vec(-1e3..1e3f64, 2..60), b in 2usize..6) {
            prop_assume!(x.len() >= b);
            let slices = quantile_slices(&x, b).unwrap();
            let mut seen = vec![false; x.len()];
            for s in &slices {
                prop_assert!(!s.is_empty());
                for &i in s {
                    prop_assert!(!seen[i]);
                    seen[i] = true;
                }
            }
            prop_assert!(seen.iter().all(|&v| v));
            let sz = sizes(&slices);
            prop_assert!(sz.iter().max().unwrap() - sz.iter().min().unwrap() <= 1);
            // contiguous in value order
            for w in slices.windows(2) {
                let hi = w[0].iter().map(|&i| x[i]).fold(f64::MIN, f64::max);
                let lo = w[1].iter().map(|&i| x[i]).fold(f64::MAX, f64::min);
                prop_assert!(hi <= lo);
            }
        }

        #[test]
        fn order_two_is_mad(x in sample()) {
            prop_assert_eq!(uni_medad_moment(&x, 1).unwrap(), mad_about_median(&x).unwrap());
        }

        #[test]
        fn paired_sample_has_zero_skew(v in prop::collection::btree_set(1u32..100_000, 1..20)) {
            let mut x = Vec::new();
            for &k in &v {
                let k = f64::from(k) / 7.0;
                x.push(k);
                x.push(-k);
            }
            prop_assert_eq!(uni_medad_moment(&x, 2).unwrap(), 0.0);
        }

        #[test]
        fn standardized_affine(x in prop::collection::vec(-1e2..1e2f64, 4..40), s in 0.1..10.0f64, t in -1e2..1e2f64) {
            prop_assume!(mad_about_median(&x).unwrap() > 1e-6);
            let base = uni_standardized(&x, 2).unwrap();
            let pos: Vec<f64> = x.iter().map(|v| s * v + t).collect();
            let neg: Vec<f64> = x.iter().map(|v| -s * v + t).collect();
            prop_assert!((uni_standardized(&pos, 2).unwrap() - base).abs() < 1e-8);
            // reflection maps slices onto each other only for tie-free samples with b | n
            prop_assume!(x.len() % 2 == 0);
            let mut sorted = x.clone();
            sorted.sort_by(f64::total_cmp);
            prop_assume!(sorted.windows(2).all(|w| w[0] < w[1]));
            prop_assert!((uni_standardized(&neg, 2).unwrap() + base).abs() < 1e-8);
        }
    }
}
