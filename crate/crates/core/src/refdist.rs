//! Population reference values for the normal and Student-t families.
//!
//! For an elliptical law the odd and peripheral moments vanish and only the
//! scale constants are non-trivial. They are medians of χ² and F laws,
//! obtained by inverting the regularized incomplete gamma and beta functions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::special::{ln_beta, ln_gamma, reg_inc_beta, reg_inc_gamma};
use crate::{Error, Result};

const BISECT_TOL: f64 = 1e-6;
const FINAL_TOL: f64 = 1e-10;

/// Solves `cdf(x) = 0.5` on `(0, ∞)`: expanding bracket, bisection, then
/// Newton steps with the analytic density.
fn median_by_inversion(cdf: impl Fn(f64) -> f64, pdf: impl Fn(f64) -> f64) -> f64 {
    let mut hi = 1.0;
    while cdf(hi) < 0.5 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > BISECT_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let step = (cdf(x) - 0.5) / pdf(x);
        if !step.is_finite() {
            break;
        }
        let next = (x - step).clamp(lo, hi);
        let moved = (next - x).abs();
        x = next;
        if moved <= FINAL_TOL * 1e-2 {
            break;
        }
    }
    x
}

/// Median of χ²_d.
pub fn chisq_median(d: usize) -> f64 {
    assert!(d >= 1, "chi-square degrees of freedom must be ≥ 1");
    let k = d as f64 / 2.0;
    let lg = ln_gamma(k);
    median_by_inversion(
        |x| reg_inc_gamma(k, x / 2.0).expect("in domain"),
        |x| ((k - 1.0) * x.ln() - x / 2.0 - k * 2f64.ln() - lg).exp(),
    )
}

/// Median of `F(d1, d2)`.
pub fn f_median(d1: f64, d2: f64) -> Result<f64> {
    if !(d1 > 0.0 && d2 > 0.0 && d1.is_finite() && d2.is_finite()) {
        return Err(Error::Domain(format!(
            "F degrees of freedom must be positive; got ({d1}, {d2})"
        )));
    }
    let (a, b) = (d1 / 2.0, d2 / 2.0);
    let lb = ln_beta(a, b);
    Ok(median_by_inversion(
        |x| reg_inc_beta(a, b, d1 * x / (d1 * x + d2)).expect("in domain"),
        |x| {
            let log = a * (d1 / d2).ln() + (a - 1.0) * x.ln() - (a + b) * (d1 * x / d2).ln_1p() - lb;
            log.exp()
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Normal,
    StudentT,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normal" | "gaussian" => Ok(Self::Normal),
            "t" | "student-t" | "student_t" => Ok(Self::StudentT),
            other => Err(Error::InvalidArgument(format!(
                "unknown family {other:?} (expected normal or t)"
            ))),
        }
    }
}

/// Population moments of the standardized normal or t law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValues {
    pub family: Family,
    pub d: usize,
    pub nu: Option<f64>,
    /// Population `Φ₂^Med`.
    pub phi2_scale: f64,
    /// Diagonal entry of the population comedian matrix.
    pub c_med_diag: f64,
    pub phi2_vec: Vec<f64>,
    pub phi3: Vec<f64>,
    pub phi4: Vec<f64>,
}

pub fn normal_reference(d: usize) -> Result<ReferenceValues> {
    if d == 0 {
        return Err(Error::Domain("dimension must be ≥ 1".into()));
    }
    Ok(ReferenceValues {
        family: Family::Normal,
        d,
        nu: None,
        phi2_scale: chisq_median(d).sqrt(),
        c_med_diag: chisq_median(1),
        phi2_vec: vec![0.0; d],
        phi3: vec![0.0; d],
        phi4: vec![0.0; d],
    })
}

pub fn t_reference(d: usize, nu: f64) -> Result<ReferenceValues> {
    if d == 0 {
        return Err(Error::Domain("dimension must be ≥ 1".into()));
    }
    Ok(ReferenceValues {
        family: Family::StudentT,
        d,
        nu: Some(nu),
        phi2_scale: (d as f64 * f_median(d as f64, nu)?).sqrt(),
        c_med_diag: f_median(1.0, nu)?,
        phi2_vec: vec![0.0; d],
        phi3: vec![0.0; d],
        phi4: vec![0.0; d],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub d: usize,
    pub nu: f64,
    pub phi2_med: f64,
}

/// `Φ₂^Med` of the standardized t law over a grid of dimensions and degrees
/// of freedom, ordered by `d` then by `ν`.
pub fn figure2_curve(d_list: &[usize], nu_grid: &[f64]) -> Result<Vec<CurvePoint>> {
    if d_list.is_empty() || nu_grid.is_empty() {
        return Err(Error::InvalidArgument("curve grids must be nonempty".into()));
    }
    let mut out = Vec::with_capacity(d_list.len() * nu_grid.len());
    for &d in d_list {
        for &nu in nu_grid {
            out.push(CurvePoint {
                d,
                nu,
                phi2_med: t_reference(d, nu)?.phi2_scale,
            });
        }
    }
    Ok(out)
}

/// Writes the curve as CSV with header `d,nu,phi2_med`.
pub fn write_curve_csv<W: Write>(points: &[CurvePoint], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| Error::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    };
    wtr.write_record(["d", "nu", "phi2_med"]).map_err(csv_err)?;
    for p in points {
        wtr.write_record([p.d.to_string(), p.nu.to_string(), p.phi2_med.to_string()])
            .map_err(csv_err)?;
    }
    wtr.flush().map_err(|e| Error::Csv {
        path: "<output>".into(),
        message: e.to_string(),
    })?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor};

    /// Independent inversion: plain bisection against statrs CDFs.
    fn oracle_median(cdf: impl Fn(f64) -> f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1e3);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf(mid) < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn chisq_anchors() {
        assert!((chisq_median(1) - 0.454936).abs() < 1e-6);
        assert!((chisq_median(2) - 2.0 * 2f64.ln()).abs() < 1e-10);
        assert!((chisq_median(3) - 2.365974).abs() < 1e-6);
    }

    #[test]
    fn chisq_against_oracle() {
        for d in 1..=50 {
            let m = chisq_median(d);
            let dist = ChiSquared::new(d as f64).unwrap();
            let o = oracle_median(|x| dist.cdf(x));
            assert!((m - o).abs() < 1e-9, "d = {d}: {m} vs {o}");
            assert!((reg_inc_gamma(d as f64 / 2.0, m / 2.0).unwrap() - 0.5).abs() < 1e-9);
        }
        for d in 1..50 {
            assert!(chisq_median(d + 1) > chisq_median(d));
        }
    }

    #[test]
    fn f_anchors() {
        assert!((f_median(1.0, 1.0).unwrap() - 1.0).abs() < 1e-10);
        for nu in [0.5, 2.0, 7.0, 33.0] {
            assert!((f_median(nu, nu).unwrap() - 1.0).abs() < 1e-10, "ν = {nu}");
        }
        assert!((f_median(1.0, 1e6).unwrap() - 0.454936).abs() < 1e-4);
        assert!(f_median(0.0, 1.0).is_err());
    }

    #[test]
    fn f_against_oracle() {
        for (d1, d2) in [(1.0, 3.0), (2.0, 3.0), (3.0, 5.0), (2.0, 40.0), (5.0, 1.0), (1.0, 0.7)] {
            let m = f_median(d1, d2).unwrap();
            let dist = FisherSnedecor::new(d1, d2).unwrap();
            let o = oracle_median(|x| dist.cdf(x));
            assert!((m - o).abs() < 1e-9 * (1.0 + o), "F({d1},{d2}): {m} vs {o}");
        }
        for d1 in [1.0, 2.0, 3.0] {
            let mut prev = f64::INFINITY;
            for nu in [1.0, 2.0, 5.0, 20.0, 200.0] {
                let m = f_median(d1, nu).unwrap();
                assert!(m < prev);
                prev = m;
            }
            assert!(prev > chisq_median(d1 as usize) / d1);
        }
    }

    #[test]
    fn reference_rows() {
        let n1 = normal_reference(1).unwrap();
        assert!((n1.phi2_scale - 0.6745).abs() < 1e-4);
        let n2 = normal_reference(2).unwrap();
        assert!((n2.phi2_scale - 1.17741).abs() < 1e-5);
        assert!((n2.c_med_diag - 0.454936).abs() < 1e-6);
        assert!(n2.phi3.iter().chain(&n2.phi4).chain(&n2.phi2_vec).all(|&v| v == 0.0));
        let cauchy = t_reference(1, 1.0).unwrap();
        assert!((cauchy.phi2_scale - 1.0).abs() < 1e-9);
        for d in 1..=3 {
            let t = t_reference(d, 1e6).unwrap();
            assert!((t.phi2_scale - normal_reference(d).unwrap().phi2_scale).abs() < 1e-3);
            assert!((t.c_med_diag - 0.454936).abs() < 1e-4);
        }
    }

    #[test]
    fn curve_shape() {
        let grid: Vec<f64> = (1..=50).map(f64::from).collect();
        let pts = figure2_curve(&[1, 2, 3], &grid).unwrap();
        assert_eq!(pts.len(), 150);
        assert!((pts[0].phi2_med - 1.0).abs() < 1e-9);
        for w in pts.windows(2).filter(|w| w[0].d == w[1].d) {
            assert!(w[1].phi2_med < w[0].phi2_med, "{w:?}");
        }
        let mut buf = Vec::new();
        write_curve_csv(&pts[..2], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0], "d,nu,phi2_med");
        let first: Vec<f64> = lines[1].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(&first[..2], &[1.0, 1.0]);
        assert!((first[2] - 1.0).abs() < 1e-9);
        assert!(figure2_curve(&[], &grid).is_err());
    }
}
