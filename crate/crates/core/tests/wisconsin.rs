use std::path::PathBuf;

use vmedad::io::{load_csv, load_wdbc, ColumnSelector, Diagnosis, ReportConfig, ReportDocument, Wdbc};
use vmedad::{baseline_report, full_report, norm, CovDivisor, ShellOrder, VMedadConfig};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn pair() -> vmedad::DataMatrix {
    load_wdbc(fixture("wdbc.data"))
        .unwrap()
        .select(&["radius_mean", "concavity_mean"])
        .unwrap()
}

fn close(got: &[f64], want: &[f64], tol: f64) -> bool {
    got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= tol)
}

#[test]
fn full_file_shape() {
    let w = load_wdbc(fixture("wdbc.data")).unwrap();
    assert_eq!((w.features.nrows(), w.features.ncols()), (569, 30));
    assert!(w.warnings.is_empty(), "{:?}", w.warnings);
    assert_eq!(w.diagnosis.iter().filter(|d| **d == Diagnosis::Malignant).count(), 212);
    assert_eq!(w.column("radius_mean").unwrap()[0], 17.99);
    assert_eq!(w.column("concavity_mean").unwrap()[0], 0.3001);
}

#[test]
fn short_fixture_warns_but_loads() {
    let w = load_wdbc(fixture("wdbc_head30.data")).unwrap();
    assert_eq!(w.features.nrows(), 30);
    assert_eq!(w.warnings.len(), 1);
    assert!(w.warnings[0].contains("30 rows"));
    assert_eq!(w.features.row(1)[0], 20.57);
}

#[test]
fn malformed_fixture() {
    let got = load_csv(fixture("malformed.csv"), &ColumnSelector::parse_list("x,y"), true).unwrap();
    assert_eq!(got.data.nrows(), 3);
    assert_eq!(got.dropped, 2);
}

#[test]
fn location_scale_and_moments() {
    let r = full_report(&pair(), &VMedadConfig::default()).unwrap();
    assert!(close(&r.phi1, &[13.36, 0.064], 0.02), "{:?}", r.phi1);
    assert!((r.phi2_scale - 1.90).abs() < 0.02, "{}", r.phi2_scale);
    let phi3 = r.phi3();
    let phi4 = r.phi4().unwrap();
    for (got, want) in [(phi3, [1.775f64, 0.054]), (phi4, [-1.525, -0.066])] {
        for (g, w) in got.iter().zip(want) {
            assert!(
                g.signum() == w.signum() && ((g - w) / w).abs() < 0.10,
                "{got:?} vs {want:?}"
            );
        }
    }
    assert!((r.norms[&3] - 1.776).abs() < 0.1776);
    let psi3 = r.psi_k(3).unwrap();
    for (p, f) in psi3.iter().zip(phi3) {
        assert_eq!(p * r.phi2_scale, *f);
    }
}

#[test]
fn depth_ascending_flips_the_shell_sign() {
    let cfg = VMedadConfig {
        shell_order: ShellOrder::DepthAscending,
        ..Default::default()
    };
    let r = full_report(&pair(), &cfg).unwrap();
    assert!(r.phi3()[0] < 0.0);
}

#[test]
fn classical_baselines() {
    let b = baseline_report(&pair(), CovDivisor::Sample).unwrap();
    assert!((b.mardia_skew - 4.03).abs() < 0.02, "{}", b.mardia_skew);
    assert!((b.mardia_kurt - 14.984).abs() < 0.02, "{}", b.mardia_kurt);
    assert!(close(&b.mrsz_skew, &[1.046, 1.982], 0.02), "{:?}", b.mrsz_skew);
    // printed kurtosis matrix, (d+2)-centered
    assert!(
        close(&b.mrsz_kurt_centered, &[1.21, -0.37, -0.37, 5.76], 0.02),
        "{:?}",
        b.mrsz_kurt_centered
    );
}

#[test]
fn named_features_match_extracted_csv() {
    let w = load_wdbc(fixture("wdbc.data")).unwrap();
    let x = w.select(&["radius_mean", "concavity_mean"]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pair.csv");
    let mut buf = Vec::new();
    vmedad::io::write_matrix_csv(&x, &["radius_mean".into(), "concavity_mean".into()], &mut buf).unwrap();
    std::fs::write(&path, buf).unwrap();
    let back = load_csv(&path, &[], true).unwrap();
    assert_eq!(back.data, x);
    let cfg = ReportConfig::default();
    let a = ReportDocument::build(&x, back.columns.clone(), None, &cfg).unwrap();
    let b = ReportDocument::build(&back.data, back.columns, None, &cfg).unwrap();
    assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    assert_eq!(Wdbc::feature_index("concavity_mean").unwrap(), 6);
    assert!(norm(a.vmedad.phi3()) > 0.0);
}
