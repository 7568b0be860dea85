//! End-to-end tests of the `fpos` binary: spec'd output shapes, exit codes,
//! and per-seed reproducibility.

use std::io::Write;
use std::process::{Command, Output};

fn fpos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpos"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = fpos(args);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn pmf_table_shape() {
    let v = stdout_json(&["pmf", "--k", "1", "--n", "2", "--N", "3"]);
    assert_eq!(v["support"], serde_json::json!([1, 2]));
    let mass = v["mass"].as_array().unwrap();
    assert!((mass[0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((mass[1].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn pmf_exact_fractions() {
    let v = stdout_json(&["pmf", "--k", "1", "--n", "2", "--N", "3", "--exact"]);
    assert_eq!(v["mass"], serde_json::json!(["2/3", "1/3"]));
    // the exact path is capped
    let out = fpos(&["pmf", "--k", "1", "--n", "2", "--N", "100", "--exact"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn pmf_single_point_and_csv() {
    let v = stdout_json(&["pmf", "--k", "3", "--n", "3", "--N", "3", "--x", "3"]);
    assert_eq!(v["mass"], serde_json::json!([1.0]));
    let out = fpos(&["pmf", "--k", "1", "--n", "2", "--N", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x,mass\n1,0.666666666666"));
    assert!(!text.contains('\r'));
}

#[test]
fn cdf_reaches_one() {
    let v = stdout_json(&["cdf", "--k", "1", "--n", "2", "--N", "3"]);
    let cdf = v["cdf"].as_array().unwrap();
    assert!((cdf[0].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-12);
    assert!((cdf[1].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn moments_float_and_exact() {
    let v = stdout_json(&["moments", "--k", "2", "--n", "4", "--N", "9"]);
    assert!((v["kurtosis"].as_f64().unwrap() - 31.0 / 14.0).abs() < 1e-12);
    let v = stdout_json(&["moments", "--k", "1", "--n", "2", "--N", "3", "--exact"]);
    assert_eq!(v["mean"], "4/3");
    assert_eq!(v["variance"], "2/9");
    // census: skewness and kurtosis are null
    let v = stdout_json(&["moments", "--k", "2", "--n", "5", "--N", "5"]);
    assert!(v["skewness"].is_null());
    assert!(v["kurtosis"].is_null());
}

#[test]
fn estimate_from_rank() {
    let v = stdout_json(&["estimate", "--n", "2", "--rank", "2", "--x", "5"]);
    assert_eq!(v["estimate"], serde_json::json!(6.5));
    assert_eq!(v["k"], serde_json::json!(2));
    assert_eq!(v["n"], serde_json::json!(2));
    assert_eq!(v["rounded"], serde_json::json!(7));
    assert!(v.get("variance_at").is_none());
}

#[test]
fn estimate_from_max_with_variance() {
    let v = stdout_json(&["estimate", "--n", "4", "--max", "60", "--variance-at", "74"]);
    assert_eq!(v["estimate"], serde_json::json!(74.0));
    assert_eq!(v["variance_at"], serde_json::json!(74.0));
    assert!(v["standard_error"].as_f64().unwrap() > 0.0);
    // impossible observation
    let out = fpos(&["estimate", "--n", "4", "--max", "3"]);
    assert_eq!(out.status.code(), Some(2));
    // neither form supplied
    let out = fpos(&["estimate", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn posterior_worked_example() {
    let v = stdout_json(&[
        "posterior",
        "--n",
        "2",
        "--k",
        "2",
        "--x",
        "2",
        "--prior",
        "uniform:2,3",
    ]);
    assert_eq!(v["support_min"], serde_json::json!(2));
    let masses = v["masses"].as_array().unwrap();
    assert!((masses[0].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((masses[1].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["mean"].as_f64().unwrap() - 2.25).abs() < 1e-12);
    assert!((v["variance"].as_f64().unwrap() - 0.1875).abs() < 1e-9);
    // malformed prior strings are parameter errors
    let out = fpos(&[
        "posterior",
        "--n",
        "2",
        "--k",
        "2",
        "--x",
        "2",
        "--prior",
        "junk",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn heatmap_csv_contract() {
    let out = fpos(&["heatmap", "--N", "10"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,n,k,lrmse"));
    assert_eq!(text.lines().count(), 1 + 10 * 9 / 2);
    assert!(text.lines().nth(1).unwrap().starts_with("10,1,1,"));
    // resource guard
    let out = fpos(&["heatmap", "--N", "1000000"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_fractions() {
    let v = stdout_json(&["oracle", "--k", "2", "--n", "2", "--N", "3"]);
    assert_eq!(v["support"], serde_json::json!([2, 3]));
    assert_eq!(v["mass"], serde_json::json!(["1/3", "2/3"]));
    let v = stdout_json(&["oracle", "--ranks", "1,2", "--n", "2", "--N", "3"]);
    assert_eq!(v["mass"], serde_json::json!(["1/3", "1/3", "1/3"]));
    // budget maps to the resource exit code
    let out = fpos(&[
        "oracle", "--k", "2", "--n", "10", "--N", "40", "--budget", "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn joint_pmf_value() {
    let v = stdout_json(&[
        "joint-pmf",
        "--ranks",
        "1,2",
        "--n",
        "2",
        "--N",
        "3",
        "--x",
        "1,3",
    ]);
    assert!((v["pmf"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
}

#[test]
fn sample_is_reproducible_per_seed() {
    let args = [
        "sample", "--k", "3", "--n", "7", "--N", "20", "--count", "32", "--seed", "7",
    ];
    let a = fpos(&args);
    let b = fpos(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    // omitted seed is drawn from entropy and echoed on stderr
    let out = fpos(&["sample", "--k", "1", "--n", "2", "--N", "5", "--count", "1"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed:"));
}

#[test]
fn simulate_csv_from_population_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pop.txt");
    let mut f = std::fs::File::create(&path).unwrap();
    writeln!(f, "5\n5\n7").unwrap();
    let path = path.to_str().unwrap();
    let out = fpos(&[
        "simulate",
        "--population",
        path,
        "--size",
        "2",
        "--ranks",
        "2,1",
        "--sims",
        "4",
        "--seed",
        "9",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert_eq!(text.lines().count(), 4);
    for line in text.lines() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 2);
        // column order follows the caller: max first, then min
        let (max, min): (f64, f64) = (cols[0].parse().unwrap(), cols[1].parse().unwrap());
        assert!(max >= min);
        assert_eq!(min, 5.0);
    }
    // identical invocation, identical bytes
    let again = fpos(&[
        "simulate",
        "--population",
        path,
        "--size",
        "2",
        "--ranks",
        "2,1",
        "--sims",
        "4",
        "--seed",
        "9",
    ]);
    assert_eq!(out.stdout, again.stdout);
    // missing file is a parameter error
    let out = fpos(&[
        "simulate",
        "--population",
        "/nonexistent",
        "--size",
        "2",
        "--ranks",
        "1",
        "--sims",
        "1",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_report_shape() {
    let v = stdout_json(&[
        "bench",
        "--N",
        "40",
        "--n",
        "20",
        "--ranks",
        "3,6,9,12,15,18",
        "--sims",
        "50",
        "--reps",
        "5",
        "--seed",
        "1",
    ]);
    assert!(v["kilosort_ns"].as_f64().unwrap() > 0.0);
    assert_eq!(v["rank_based"]["raw_seconds"].as_array().unwrap().len(), 5);
    assert!(v["standard"]["median_kilosorts"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_spec_is_a_parameter_error() {
    let out = fpos(&["pmf", "--k", "5", "--n", "2", "--N", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error: "));
    let out = fpos(&["pmf", "--k", "1", "--n", "2", "--N", "3", "--bogus"]);
    assert_eq!(out.status.code(), Some(2));
}
