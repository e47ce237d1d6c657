//! Depth-based vector median absolute deviation (VMedAD) moments.
//!
//! The crate estimates robust, direction-preserving multivariate shape
//! descriptors from a sample: a spatial median, a median-based scale and
//! comedian matrix, and alternating sums of shellwise coordinate medians
//! where the shells come from ranking observations by spatial depth.
//!
//! Alongside the robust estimators it carries the classical comparators
//! (Mardia, MRSz), closed-form reference values for elliptical normal and
//! Student t laws, seeded samplers with a small experiment harness, and
//! CSV / WDBC ingestion with a JSON report format.
//!
//! ```
//! use vmedad::{full_report, DataMatrix, VMedadConfig};
//!
//! let x = DataMatrix::from_rows(&[
//!     vec![0.0, 0.0], vec![1.0, 0.2], vec![-0.8, 0.4], vec![0.3, -1.1],
//!     vec![2.5, 1.9], vec![-0.2, 0.7], vec![0.9, -0.3], vec![-1.4, -0.6],
//! ]).unwrap();
//! let report = full_report(&x, &VMedadConfig::default()).unwrap();
//! assert_eq!(report.phi.get(&3).map(|v| v.len()), Some(2));
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
mod data;
pub mod depth;
mod error;
pub mod geometry;
pub mod io;
pub mod medstats;
pub mod refdist;
pub mod simulate;
pub mod special;
pub mod vmoments;

pub use baselines::{baseline_report, BaselineReport, CovDivisor};
pub use data::DataMatrix;
pub use depth::{DepthProfile, DepthScaling, ShellOrder};
pub use error::{Error, Result};
pub use geometry::{CenterEstimate, ComedianMatrix};
pub use refdist::ReferenceValues;
pub use vmoments::{full_report, VMedadConfig, VMedadReport};

/// Euclidean norm of a slice.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
