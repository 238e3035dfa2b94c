//! Black-box tests of the command-line binary.

use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_trustspectra"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn decompose_fixture_block_reports_published_weights() {
    let out = run(&[
        "decompose", "--rows", "i,j,k", "--cols", "a,b,c,d", "--tol", "0.01", "--output", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lambdas = doc["lambdas"].as_array().unwrap();
    assert_eq!(lambdas.len(), 2);
    assert!((lambdas[0].as_f64().unwrap() - 3.0).abs() <= 0.02);
    assert!((lambdas[1].as_f64().unwrap() - 1.0).abs() <= 0.02);
}

#[test]
fn decompose_single_cell_block() {
    let out = run(&["decompose", "--rows", "i", "--cols", "a", "--output", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lambdas = doc["lambdas"].as_array().unwrap();
    assert_eq!(lambdas.len(), 1);
    assert!((lambdas[0].as_f64().unwrap() - 1.25).abs() <= 1e-12);
}

#[test]
fn decompose_missing_cell_exits_2_and_names_it() {
    let out = run(&["decompose", "--rows", "i,l", "--cols", "a,b"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("(l, b)"), "stderr: {err}");
}

#[test]
fn edge_c_i_matches_published_components() {
    let out = run(&[
        "edge", "--subject", "c", "--object", "i", "--tol", "0.01", "--output", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let comps = doc["components"].as_array().unwrap();
    assert!((comps[0]["r"].as_f64().unwrap() - 1.245).abs() <= 0.02);
    assert!((comps[1]["r"].as_f64().unwrap() + 0.12).abs() <= 0.02);
}

#[test]
fn recommend_b_concept_2_ranks_k_first() {
    let out = run(&[
        "recommend", "--subject", "b", "--concept", "2", "--tol", "0.01", "--output", "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["ranking"][0]["object"], "k");
}

#[test]
fn check_reports_induced_violations_and_clean_spectral_map() {
    let out = run(&["check", "--tol", "0.01", "--samples", "50", "--output", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(doc["induced_map"]["violations"].as_u64().unwrap() >= 1);
    assert_eq!(doc["similarity_map"]["violations"].as_u64().unwrap(), 0);
}

#[test]
fn selftest_passes() {
    let out = run(&["selftest"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("selftest passed"));
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        vec!["decompose", "--output", "json"],
        vec!["check", "--samples", "20", "--seed", "7", "--output", "json"],
        vec!["concepts", "--tol", "0.01", "--output", "table"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "args: {args:?}");
    }
}

#[test]
fn decompose_roundtrips_through_saved_json() {
    let out = run(&["decompose", "--rows", "i,j,k", "--cols", "a,b,c,d", "--output", "json"]);
    assert!(out.status.success());
    let d = trustspectra::spectral::SpectralDecomposition::from_json(&stdout(&out)).unwrap();
    let direct = trustspectra::spectral::svd(
        &trustspectra::fixture::fixture_block(),
        0.0,
        trustspectra::spectral::SvdMethod::GolubKahan,
    )
    .unwrap();
    assert!(d.reconstruct().sub(&direct.reconstruct()).max_abs() <= 1e-12);
}

#[test]
fn greedy_block_defaults_to_largest_complete_block() {
    let out = run(&["block", "--output", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), ",a,b,c,d");
    let rows: Vec<&str> = lines.map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(rows, ["i", "j", "k"]);
}

#[test]
fn ingest_long_csv_file() {
    let mut tmp = tempfile::NamedTempFile::with_suffix(".csv").unwrap();
    write!(
        tmp,
        "trustor,trustee,rating\na,i,1.25\nb,i,1.05\na,j,0.83\nb,j,1.13\n"
    )
    .unwrap();
    let out = run(&[
        "ingest",
        "--input",
        tmp.path().to_str().unwrap(),
        "--format",
        "long-csv",
        "--output",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["filled"], 4);
    assert_eq!(doc["trustees"].as_array().unwrap().len(), 2);
}

#[test]
fn fixtures_env_var_overrides_input() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("table1.csv"), ",x,y\np,1,0\nq,0,1\n").unwrap();
    let out = bin()
        .args(["ingest", "--output", "json"])
        .env("TRUSTSPECTRA_FIXTURES", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["trustors"], serde_json::json!(["x", "y"]));
}

#[test]
fn power_method_decompose_gives_top_triple() {
    let out = run(&[
        "decompose", "--rows", "i,j,k", "--cols", "a,b,c,d", "--method", "power", "--output",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lambdas = doc["lambdas"].as_array().unwrap();
    assert_eq!(lambdas.len(), 1);
    assert!((lambdas[0].as_f64().unwrap() - 3.0).abs() <= 0.02);
}
