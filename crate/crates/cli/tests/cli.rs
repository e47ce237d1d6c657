use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vmedad::io::ReportDocument;

fn vmedad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vmedad"))
        .args(args)
        .output()
        .expect("spawn vmedad")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn wdbc() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/wdbc.data")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reference_table_and_json() {
    let table = stdout(&vmedad(&["reference", "--family", "normal", "--d", "1"]));
    assert!(table.contains("0.6745"), "{table}");
    let json: serde_json::Value = serde_json::from_str(&stdout(&vmedad(&[
        "reference",
        "--family",
        "t",
        "--d",
        "1",
        "--nu",
        "1",
        "--json",
    ])))
    .unwrap();
    assert!((json["phi2_scale"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn reference_t_without_nu_fails() {
    let out = vmedad(&["reference", "--family", "t", "--d", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn missing_input_names_the_path() {
    let out = vmedad(&["analyze", "no/such/file.csv"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("no/such/file.csv"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(vmedad(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(vmedad(&["reference", "--d", "two"]).status.code(), Some(2));
}

#[test]
fn analyze_is_deterministic_and_matches_wdbc() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pair.csv");
    let w = vmedad::io::load_wdbc(wdbc()).unwrap();
    let x = w.select(&["radius_mean", "concavity_mean"]).unwrap();
    let mut buf = Vec::new();
    vmedad::io::write_matrix_csv(&x, &["radius_mean".into(), "concavity_mean".into()], &mut buf).unwrap();
    std::fs::write(&csv, buf).unwrap();

    let a = stdout(&vmedad(&["analyze", s(&csv)]));
    let b = stdout(&vmedad(&["analyze", s(&csv)]));
    assert_eq!(a, b);

    let json = dir.path().join("wdbc.json");
    let table = stdout(&vmedad(&["wdbc", "--file", s(&wdbc()), "--out", s(&json)]));
    assert!(table.contains("published") && table.contains("1.775"), "{table}");
    let from_csv = ReportDocument::from_json(&a).unwrap();
    let from_wdbc = ReportDocument::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(from_csv.vmedad, from_wdbc.vmedad);
    assert_eq!(from_csv.baselines, from_wdbc.baselines);
    assert_eq!(from_csv.metadata.columns, from_wdbc.metadata.columns);
}

#[test]
fn analyze_column_selection_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let rows: String = (0..40)
        .map(|i| format!("{},{},{}\n", i, (i * 7) % 11, (i * i) % 13))
        .collect();
    std::fs::write(&csv, rows).unwrap();
    let out = stdout(&vmedad(&[
        "analyze",
        s(&csv),
        "--no-header",
        "--cols",
        "0,2",
        "--b-max",
        "4",
        "--no-baselines",
        "--seed",
        "9",
    ]));
    let doc = ReportDocument::from_json(&out).unwrap();
    assert_eq!(doc.metadata.d, 2);
    assert_eq!(doc.metadata.columns, vec!["col0", "col2"]);
    assert!(doc.baselines.is_none());
    assert!(doc.vmedad.phi.contains_key(&5));
    assert_eq!(doc.metadata.config.seed, Some(9));
}

#[test]
fn figure2_csv() {
    let out = stdout(&vmedad(&["figure2", "--d", "1,2", "--nu", "1,2,3"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "d,nu,phi2_med");
    assert_eq!(lines.len(), 7);
    let first: f64 = lines[1].split(',').nth(2).unwrap().parse().unwrap();
    assert!((first - 1.0).abs() < 1e-9);
}

#[test]
fn figure1_csv_has_points_and_arrows() {
    let out = stdout(&vmedad(&["figure1", "--seed", "2"]));
    let (points, arrows) = out.split_once("\n\n").unwrap();
    assert_eq!(points.lines().next(), Some("x1,x2,shell"));
    assert_eq!(points.lines().count(), 501);
    let arrows: Vec<&str> = arrows.lines().collect();
    assert_eq!(arrows[0], "arrow,x0,y0,dx,dy");
    for (line, name) in arrows[1..].iter().zip(["phi3", "phi4", "gamma2"]) {
        assert!(line.starts_with(name));
    }
}

#[test]
fn experiment_commands_write_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let summary = dir.path().join("b.json");
    stdout(&vmedad(&[
        "breakdown",
        "--n",
        "300",
        "--eps",
        "0,0.1",
        "--replicates",
        "2",
        "--out",
        s(&csv),
        "--summary",
        s(&summary),
    ]));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(
        text.starts_with("epsilon,replicate,"),
        "{}",
        text.lines().next().unwrap()
    );
    assert_eq!(text.lines().count(), 5);
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(json["summary"].as_array().unwrap().len(), 2);

    let out = stdout(&vmedad(&["consistency", "--n", "100,200", "--replicates", "2"]));
    assert!(out.contains("err_phi2_scale"), "{out}");
    let out = stdout(&vmedad(&["equivariance", "--trials", "3"]));
    assert!(out.contains("max_violation"), "{out}");
}

#[test]
fn equivariance_on_csv_input() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("x.csv");
    let rows: String = (0..30)
        .map(|i| format!("{},{}\n", (i * 37) % 17, (i * 13) % 19))
        .collect();
    std::fs::write(&csv, format!("a,b\n{rows}")).unwrap();
    let out = dir.path().join("eq.csv");
    stdout(&vmedad(&[
        "equivariance",
        "--input",
        s(&csv),
        "--trials",
        "4",
        "--out",
        s(&out),
    ]));
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 5);
}
