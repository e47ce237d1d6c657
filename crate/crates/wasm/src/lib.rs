//! Browser bindings for the interactive demo page in `www/`.
//!
//! Each export returns a JSON string; the page draws it on a canvas.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use vmedad::baselines::{mardia, mean, mrsz_skew};
use vmedad::depth::assign_shells;
use vmedad::refdist::{normal_reference, t_reference};
use vmedad::simulate::{angle_deg, contaminate, sample_mixture, sample_mvn, MixtureComponent, MixtureSpec};
use vmedad::vmoments::analyze;
use vmedad::{norm, CovDivisor, ShellOrder, VMedadConfig};

type DemoResult<T> = std::result::Result<T, String>;

#[derive(Serialize)]
struct MixtureView {
    points: Vec<[f64; 3]>,
    median: Vec<f64>,
    phi3: Vec<f64>,
    phi4: Vec<f64>,
    gamma2: Vec<f64>,
    angle_phi3: f64,
    angle_gamma2: f64,
}

/// Two-cluster normal mixture: main cloud `N((50,50), 6²I)` and a minor
/// cloud `N((50+s, 50+s), 3²I)` with weight `minor_weight`.
pub fn mixture_json(seed: u64, n: usize, minor_weight: f64, separation: f64) -> DemoResult<String> {
    if !(0.0..1.0).contains(&minor_weight) {
        return Err(format!("minor weight must lie in [0, 1), got {minor_weight}"));
    }
    let mut components = vec![MixtureComponent {
        weight: 1.0 - minor_weight,
        mean: vec![50.0, 50.0],
        cov: vec![36.0, 0.0, 0.0, 36.0],
    }];
    if minor_weight > 0.0 {
        let c = 50.0 + separation;
        components.push(MixtureComponent {
            weight: minor_weight,
            mean: vec![c, c],
            cov: vec![9.0, 0.0, 0.0, 9.0],
        });
    }
    let x = sample_mixture(n, &MixtureSpec { components }, seed).map_err(|e| e.to_string())?;
    let a = analyze(&x, &VMedadConfig::default()).map_err(|e| e.to_string())?;
    let shells = assign_shells(&a.depths, 2, ShellOrder::CenterOut).map_err(|e| e.to_string())?;
    let gamma2 = mrsz_skew(&x, CovDivisor::Sample).map_err(|e| e.to_string())?;
    let phi3 = a.report.phi3().to_vec();
    let diag = [1.0, 1.0];
    let view = MixtureView {
        points: x
            .rows()
            .zip(&shells.shell_of)
            .map(|(r, &s)| [r[0], r[1], s as f64])
            .collect(),
        median: a.report.phi1.clone(),
        phi4: a.report.phi4().map(<[f64]>::to_vec).unwrap_or_default(),
        angle_phi3: angle_deg(&phi3, &diag),
        angle_gamma2: angle_deg(&gamma2, &diag),
        phi3,
        gamma2,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CurveView {
    d: usize,
    nu: Vec<f64>,
    phi2_med: Vec<f64>,
    normal_limit: f64,
}

/// `Φ₂^Med` of the standardized t law for `ν = 1..=nu_max`.
pub fn t_curve_json(d: usize, nu_max: usize) -> DemoResult<String> {
    if nu_max == 0 {
        return Err("nu_max must be ≥ 1".into());
    }
    let nu: Vec<f64> = (1..=nu_max).map(|v| v as f64).collect();
    let phi2_med = nu
        .iter()
        .map(|&v| t_reference(d, v).map(|r| r.phi2_scale))
        .collect::<vmedad::Result<Vec<_>>>()
        .map_err(|e| e.to_string())?;
    let normal_limit = normal_reference(d).map_err(|e| e.to_string())?.phi2_scale;
    serde_json::to_string(&CurveView {
        d,
        nu,
        phi2_med,
        normal_limit,
    })
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Summary {
    median: Vec<f64>,
    mean: Vec<f64>,
    phi2_scale: f64,
    phi3: Vec<f64>,
    norm_phi3: f64,
    mardia_b1: f64,
}

#[derive(Serialize)]
struct ContaminationView {
    /// Clean points; the replaced ones are flagged with 1.
    points: Vec<[f64; 3]>,
    replaced: usize,
    clean: Summary,
    contaminated: Summary,
}

fn summarize(x: &vmedad::DataMatrix) -> DemoResult<Summary> {
    let a = analyze(x, &VMedadConfig::default()).map_err(|e| e.to_string())?;
    let phi3 = a.report.phi3().to_vec();
    Ok(Summary {
        median: a.report.phi1.clone(),
        mean: mean(x),
        phi2_scale: a.report.phi2_scale,
        norm_phi3: norm(&phi3),
        phi3,
        mardia_b1: mardia(x, CovDivisor::Sample).map_err(|e| e.to_string())?.0,
    })
}

/// `N₂(0, I)` sample with a fraction `epsilon` of rows moved to distance
/// `10^log10_magnitude` along the diagonal.
pub fn contamination_json(seed: u64, n: usize, epsilon: f64, log10_magnitude: f64) -> DemoResult<String> {
    let x = sample_mvn(n, &[0.0, 0.0], &[1.0, 0.0, 0.0, 1.0], seed).map_err(|e| e.to_string())?;
    let (y, idx) = contaminate(&x, epsilon, 10f64.powf(log10_magnitude), None, seed).map_err(|e| e.to_string())?;
    let mut flag = vec![0.0; n];
    idx.iter().for_each(|&i| flag[i] = 1.0);
    let view = ContaminationView {
        points: x.rows().zip(&flag).map(|(r, &f)| [r[0], r[1], f]).collect(),
        replaced: idx.len(),
        clean: summarize(&x)?,
        contaminated: summarize(&y)?,
    };
    serde_json::to_string(&view).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = mixtureDemo)]
pub fn mixture_demo(seed: u32, n: u32, minor_weight: f64, separation: f64) -> Result<String, JsError> {
    mixture_json(seed.into(), n as usize, minor_weight, separation).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = tScaleCurve)]
pub fn t_scale_curve(d: u32, nu_max: u32) -> Result<String, JsError> {
    t_curve_json(d as usize, nu_max as usize).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = contaminationDemo)]
pub fn contamination_demo(seed: u32, n: u32, epsilon: f64, log10_magnitude: f64) -> Result<String, JsError> {
    contamination_json(seed.into(), n as usize, epsilon, log10_magnitude).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    #[test]
    fn mixture_matches_core_figure() {
        let v: Value = serde_json::from_str(&mixture_json(1, 500, 0.3, 30.0).unwrap()).unwrap();
        let rec = vmedad::simulate::run_figure1(1).unwrap();
        let phi3: Vec<f64> = serde_json::from_value(v["phi3"].clone()).unwrap();
        assert_eq!(phi3, rec.phi3);
        assert_eq!(v["points"].as_array().unwrap().len(), 500);
    }

    #[test]
    fn mixture_single_cluster_and_bad_weight() {
        assert!(mixture_json(1, 100, 0.0, 30.0).is_ok());
        assert!(mixture_json(1, 100, 1.0, 30.0).is_err());
    }

    #[test]
    fn curve_decreases_toward_normal() {
        let v: Value = serde_json::from_str(&t_curve_json(2, 30).unwrap()).unwrap();
        let ys: Vec<f64> = serde_json::from_value(v["phi2_med"].clone()).unwrap();
        assert_eq!(ys.len(), 30);
        assert!(ys.windows(2).all(|w| w[1] < w[0]));
        assert!(ys[29] > v["normal_limit"].as_f64().unwrap());
        assert!(t_curve_json(2, 0).is_err());
    }

    #[test]
    fn contamination_moves_mean_not_median() {
        let v: Value = serde_json::from_str(&contamination_json(3, 400, 0.1, 6.0).unwrap()).unwrap();
        assert_eq!(v["replaced"].as_u64(), Some(40));
        let mean: Vec<f64> = serde_json::from_value(v["contaminated"]["mean"].clone()).unwrap();
        let median: Vec<f64> = serde_json::from_value(v["contaminated"]["median"].clone()).unwrap();
        assert!(norm(&mean) > 1e4);
        assert!(norm(&median) < 1.0);
        assert!(contamination_json(3, 400, 0.6, 6.0).is_err());
    }
}
