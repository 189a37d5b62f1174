use std::process::{Command, Output};

use serde_json::Value;

fn qwsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwsearch")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_record(out: &Output) -> Value {
    assert!(out.stdout.is_empty());
    let text = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(text.trim().lines().count(), 1, "{text}");
    serde_json::from_str(text.trim()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
}

#[test]
fn evolve_trace_peaks_at_half() {
    let text = stdout(&qwsearch(&["evolve", "--M", "1000", "--w", "1", "--t-max", "150", "--dt", "0.05"]));
    assert_eq!(text.lines().next(), Some("t,p_a,p_inferred"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 3001);
    let first_peak = rows.windows(3).find(|w| w[1][1] > w[0][1] && w[1][1] > w[2][1]).unwrap();
    assert!((first_peak[1][0] - 49.67).abs() < 0.1 && (first_peak[1][1] - 0.5).abs() < 0.01);
}

#[test]
fn csv_uses_twelve_significant_digits() {
    let text = stdout(&qwsearch(&["evolve", "--M", "10", "--w", "1", "--t-max", "1", "--dt", "0.5"]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row, ["0", "0.0500000000000", "0.100000000000"]);
}

#[test]
fn predict_reports_the_large_regime() {
    let v: Value = serde_json::from_str(&stdout(&qwsearch(&["predict", "--M", "1000", "--w", "100"]))).unwrap();
    assert_eq!(v["regime"], "Large");
    let t = v["t_star"].as_f64().unwrap();
    assert!((t - 70.538).abs() < 1e-3);
    assert!((v["p_star"].as_f64().unwrap() - 0.9918).abs() < 1e-4);
    assert_eq!(v["expected_runtime"].as_f64().unwrap(), t);
    for key in ["gamma_c", "p_effective", "final_state_amplitudes"] {
        assert!(!v[key].is_null(), "{key}");
    }
}

#[test]
fn classify_examples() {
    for (w, tag) in [("1", "Small"), ("100", "Large"), ("500", "Large"), ("20000", "XXL")] {
        let v: Value = serde_json::from_str(&stdout(&qwsearch(&["classify", "--M", "1000", "--w", w]))).unwrap();
        assert_eq!(v["regime"], tag, "w={w}");
    }
}

#[test]
fn verify_subspace_reports_small_residual() {
    let v: Value = serde_json::from_str(&stdout(&qwsearch(&["verify-subspace", "--M", "16", "--w", "4"]))).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() < 1e-8);
    assert_eq!(v["samples"], 20);
}

#[test]
fn size_cap_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qwsearch"))
        .args(["verify-subspace", "--M", "16", "--w", "4"])
        .env("QWSEARCH_MAX_FULLSPACE_M", "8")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_record(&out)["error"], "size-limit");
}

#[test]
fn errors_are_json_with_distinct_codes() {
    let bad = qwsearch(&["evolve", "--M", "1000", "--w", "-3"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(error_record(&bad)["error"], "invalid-argument");

    let unknown = qwsearch(&["predict", "--M", "10", "--w", "1", "--gamma", "0.1"]);
    assert_eq!(unknown.status.code(), Some(2));
    assert_eq!(error_record(&unknown)["error"], "invalid-argument");

    let missing = qwsearch(&["sweep-k", "--M", "1000"]);
    assert_eq!(missing.status.code(), Some(2));
    assert_eq!(error_record(&missing)["error"], "invalid-argument");
}

#[test]
fn exit_codes_differ_per_error_class() {
    use qwsearch::Error;
    let errors = [
        Error::InvalidArgument(String::new()),
        Error::SizeLimit { m: 1, cap: 0 },
        Error::NoMaximum { t_max: 1.0 },
        Error::RootNotFound { scan: 1.0 },
    ];
    let mut codes: Vec<i32> = errors.iter().map(Error::exit_code).collect();
    codes.dedup();
    assert_eq!(codes.len(), errors.len());
    assert!(codes.iter().all(|&c| c != 0));
}

#[test]
fn sweep_k_csv_header_and_rows() {
    let text = stdout(&qwsearch(&["sweep-k", "--M", "1000", "--k", "0.5,1,2"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("M,w,k,gamma,t_exact,p_exact,t_pred,p_pred,expected_runtime,regime"));
    let k1: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    assert_eq!(k1[2], "1.00000000000");
    assert!((k1[5].parse::<f64>().unwrap() - 0.82).abs() < 0.01);
    assert_eq!(k1[9], "Medium");
}

#[test]
fn sweep_time_is_long_format() {
    let text = stdout(&qwsearch(&["sweep-time", "--M", "50", "--w", "1,10", "--t-max", "2", "--dt", "1"]));
    assert_eq!(text.lines().next(), Some("w,gamma,t,p_a,p_inferred"));
    assert_eq!(text.lines().count(), 7);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("energy.json");
    let out = qwsearch(&["energy", "--M", "2", "--w", "1", "--out", path.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["walk_norm"].as_f64().unwrap(), 0.75);
    assert_eq!(v["total_bound"].as_f64().unwrap(), 1.75);
}

#[test]
fn output_is_byte_stable() {
    for args in [
        &["reproduce", "fig5a"][..],
        &["reproduce", "table1", "--format", "json"],
        &["evolve", "--M", "300", "--w", "17.5"],
    ] {
        assert_eq!(stdout(&qwsearch(args)), stdout(&qwsearch(args)), "{args:?}");
    }
}

#[test]
fn reproduce_fig2b_has_five_traces() {
    let text = stdout(&qwsearch(&["reproduce", "fig2b"]));
    let rows = csv_rows(&text);
    let mut ws: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    ws.dedup();
    assert_eq!(ws, [100.0, 500.0, 1000.0, 3000.0, 20000.0]);
    let w100: Vec<&Vec<f64>> = rows.iter().filter(|r| r[0] == 100.0).collect();
    let peak = w100.iter().max_by(|a, b| a[3].total_cmp(&b[3])).unwrap();
    assert!((peak[2] - 70.5).abs() < 1.0 && peak[3] > 0.97);
}

#[test]
fn reproduce_fig4_uses_three_rates() {
    let rows = csv_rows(&stdout(&qwsearch(&["reproduce", "fig4"])));
    let mut gammas: Vec<f64> = rows.iter().map(|r| r[1]).collect();
    gammas.dedup();
    let (m, w) = (1000.0, 1000f64.sqrt());
    let want = [1.0 / m, 1.0 / (m + w), 1.0 / m - w / (m * m)];
    assert_eq!(gammas.len(), 3);
    for (g, x) in gammas.iter().zip(want) {
        assert!((g - x).abs() < 1e-14);
    }
}

#[test]
fn reproduce_fig6_root() {
    let rows = csv_rows(&stdout(&qwsearch(&["reproduce", "fig6"])));
    assert_eq!(rows.first().unwrap()[0], 0.0);
    assert_eq!(rows.last().unwrap()[0], 6.0);
    let crossing = rows.windows(2).skip(1).find(|w| (w[0][1] < 0.0) != (w[1][1] < 0.0)).unwrap();
    assert!((1.76..=1.78).contains(&crossing[1][0]));
}

#[test]
fn reproduce_table1_rows() {
    let text = stdout(&qwsearch(&["reproduce", "table1"]));
    let lines: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let tags: Vec<&str> = lines.iter().map(|l| l[0]).collect();
    assert_eq!(tags, ["Small", "Medium", "Large", "XL", "XXL"]);
    let expected = |i: usize| lines[i][7].parse::<f64>().unwrap();
    let root = 1000f64.sqrt();
    assert!((expected(0) - std::f64::consts::PI * root).abs() < 1e-6);
    assert!((expected(2) - std::f64::consts::PI * root / 2f64.sqrt()).abs() < 1.0);
}

#[test]
fn reproduce_fig5_columns() {
    let a = stdout(&qwsearch(&["reproduce", "fig5a"]));
    let b = stdout(&qwsearch(&["reproduce", "fig5b"]));
    assert_eq!(a.lines().next(), Some("k,p_exact,p_pred"));
    assert_eq!(b.lines().next(), Some("k,t_exact,t_pred"));
    assert_eq!(a.lines().count(), 101);
}

#[test]
fn help_is_not_an_error() {
    let out = qwsearch(&["--help"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep-k"));
}
