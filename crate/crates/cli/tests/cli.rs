use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn mwrc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mwrc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = mwrc(&all);
    let value = serde_json::from_slice(&out.stdout).expect("json report");
    (out.status.code().unwrap(), value)
}

#[test]
fn analyze_xor() {
    let out = mwrc(&["analyze", &fixture("xor.json")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ABCMI: pass"));
    assert!(text.contains("rates r = (0.500000000, 0.500000000, 0.500000000)"));
    assert!(text.contains("kappa* = 1.000000000"));

    let (_, report) = json(&["analyze", &fixture("xor.json")]);
    assert_eq!(report["kappa_star"].as_f64(), Some(1.0));
    assert_eq!(report["abcmi"]["satisfied"], true);
    assert_eq!(report["rates"]["conditions"]["c2"], true);
}

#[test]
fn analyze_independent_bits() {
    let (code, report) = json(&["analyze", &fixture("independent.json")]);
    assert_eq!(code, 0);
    assert_eq!(report["abcmi"]["satisfied"], true);
    let rates: Vec<f64> = report["rates"]["rates"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    assert_eq!(rates, vec![1.0; 3]);
    assert_eq!(report["kappa_star"].as_f64(), Some(2.0));
}

#[test]
fn malformed_pmf_is_rejected() {
    let out = mwrc(&["analyze", &fixture("malformed.json")]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(
        err.contains("SumNotOne") && err.contains("source.probs"),
        "{err}"
    );

    let out = mwrc(&["analyze", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn feasibility_verdicts() {
    let (code, report) = json(&["feasible", &fixture("xor.json"), "--kappa", "1.0"]);
    assert_eq!(code, 0);
    assert_eq!(report["feasible"], true);
    assert!(report["witness"].is_array());

    let (code, report) = json(&["feasible", &fixture("xor.json"), "--kappa", "0.5"]);
    assert_eq!(code, 1);
    assert_eq!(report["witness"], serde_json::Value::Null);

    let out = mwrc(&["feasible", &fixture("xor.json"), "--kappa", "0"]);
    assert_eq!(out.status.code(), Some(2));

    let (code, _) = json(&[
        "feasible",
        &fixture("independent.json"),
        "--kappa",
        "0.99",
        "--relative",
    ]);
    assert_eq!(code, 1);
}

#[test]
fn other_subcommands() {
    let (code, report) = json(&["abcmi", &fixture("xor.json")]);
    assert_eq!(
        (code, report["abcmi"]["satisfied"].clone()),
        (0, true.into())
    );
    let (code, report) = json(&["rates", &fixture("independent.json")]);
    assert_eq!(code, 0);
    assert_eq!(report["rates"]["conditions"]["c1"], true);
    let (code, report) = json(&["kappa", &fixture("xor.json")]);
    assert_eq!(code, 0);
    assert_eq!(report["min_feasible_kappa"].as_f64(), Some(1.0));
}

#[test]
fn simulate_sweep_is_monotone() {
    let (code, report) = json(&[
        "simulate",
        &fixture("xor.json"),
        "--kappa",
        "0.8,1.0,1.3",
        "--relative",
        "--trials",
        "400",
    ]);
    assert_eq!(code, 0);
    let pe: Vec<f64> = report["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["pe_overall"].as_f64().unwrap())
        .collect();
    assert_eq!(pe.len(), 3);
    assert_eq!(pe[0], 1.0);
    assert!(pe[1] <= pe[0] && pe[2] <= pe[1], "{pe:?}");
}

#[test]
fn symbol_level_limits() {
    let out = mwrc(&[
        "simulate",
        &fixture("xor.json"),
        "--mode",
        "symbol-level",
        "--m",
        "20",
        "--kappa",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("TractabilityExceeded"));
}

#[test]
fn numbers_use_nine_decimals_and_sorted_keys() {
    let out = mwrc(&["--json", "kappa", &fixture("xor.json")]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"kappa_star\": 1.000000000"), "{text}");
    let keys: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    assert_eq!(keys, sorted);
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_mwrc"))
        .args(["kappa", &fixture("xor.json")])
        .env("MWRC_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_mwrc"))
        .args(["kappa", &fixture("xor.json")])
        .env("MWRC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
