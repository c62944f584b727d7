use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tsdep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsdep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn simulate_is_deterministic_and_csv_shaped() {
    let args = [
        "simulate",
        "--process",
        "cross_ar13",
        "--n",
        "50",
        "--seed",
        "9",
    ];
    let a = stdout(&tsdep(&args));
    assert_eq!(a, stdout(&tsdep(&args)));
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "t,x,y");
    assert_eq!(lines.len(), 51);
    assert_ne!(
        a,
        stdout(&tsdep(&[
            "simulate",
            "--process",
            "cross_ar13",
            "--n",
            "50",
            "--seed",
            "10"
        ]))
    );
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("spec.json");
    fs::write(
        &cfg,
        r#"{"process": {"kind": "cross_ar1", "phi": 0.5}, "n": 40, "trials": 3, "replicates": 10, "seed": 4}"#,
    )
    .unwrap();
    let out = stdout(&tsdep(&[
        "power",
        "--config",
        path(&cfg),
        "--n",
        "30",
        "--format",
        "json",
    ]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["kind"], "power");
    let rows = v["results"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows
        .iter()
        .all(|r| r["sweep_value"] == 30.0 && r["trials"] == 3));
}

#[test]
fn single_trial_rate_is_zero_or_one() {
    let out = stdout(&tsdep(&[
        "power",
        "--process",
        "nonlin_lag1",
        "--n",
        "40",
        "--trials",
        "1",
        "--reps",
        "20",
        "--test",
        "mgcx",
    ]));
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("sweep_value,test,rejection_rate,stderr,trials")
    );
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert!(fields[2] == "0" || fields[2] == "1");
    assert_eq!(fields[3], "0");
}

#[test]
fn sweep_flag_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("power.csv");
    let args = [
        "power",
        "--process",
        "extinct_ar1",
        "--n",
        "40",
        "--sweep",
        "delta=0,0.5",
        "--trials",
        "2",
        "--reps",
        "10",
        "--test",
        "dcorrx",
        "--out",
        path(&out),
    ];
    stdout(&tsdep(&args));
    let first = fs::read(&out).unwrap();
    stdout(&tsdep(&args));
    assert_eq!(first, fs::read(&out).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().starts_with("0.5,dcorrx,"));
}

#[test]
fn zero_max_lag_histogram_is_degenerate() {
    let out = stdout(&tsdep(&[
        "lags",
        "--process",
        "cross_ar1",
        "--n",
        "30",
        "--trials",
        "4",
        "--max-lag",
        "0",
        "--test",
        "dcorrx",
    ]));
    assert_eq!(
        out,
        "sweep_value,test,lag,count,frequency\n30,dcorrx,0,4,1\n"
    );
}

#[test]
fn lags_default_to_ten() {
    let out = stdout(&tsdep(&[
        "lags",
        "--process",
        "nonlin_lag3",
        "--n",
        "40",
        "--trials",
        "2",
        "--test",
        "mgcx",
    ]));
    assert_eq!(out.lines().count(), 12);
}

#[test]
fn pairwise_and_test_on_simulated_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("series.csv");
    stdout(&tsdep(&[
        "simulate",
        "--process",
        "nonlin_lag1",
        "--n",
        "60",
        "--seed",
        "2",
        "--out",
        path(&csv),
    ]));

    let out = stdout(&tsdep(&[
        "pairwise",
        path(&csv),
        "--header",
        "--reps",
        "20",
        "--max-lag-search",
        "3",
        "--format",
        "json",
    ]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["labels"], serde_json::json!(["t", "x", "y"]));
    for key in ["p_values", "optimal_lags", "row_scales", "col_scales"] {
        let m = v[key].as_array().unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.iter().all(|r| r.as_array().unwrap().len() == 3));
    }

    let out = stdout(&tsdep(&[
        "test",
        path(&csv),
        "--header",
        "--x",
        "x",
        "--y",
        "y",
        "--test",
        "dcorrx",
        "--reps",
        "50",
        "--seed",
        "1",
    ]));
    let mut lines = out.lines();
    assert_eq!(
        lines.next(),
        Some("test,statistic,p_value,optimal_lag,max_lag,block_size,replicates,seed")
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "dcorrx");
    let p: f64 = row[2].parse().unwrap();
    assert!((0.0..=1.0).contains(&p));
    assert_eq!(row[5], "8");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let bad = tsdep(&[
        "simulate",
        "--process",
        "cross_ar1",
        "--phi",
        "1.5",
        "--n",
        "10",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let bad = tsdep(&[
        "power",
        "--process",
        "cross_ar1",
        "--n",
        "20",
        "--trials",
        "2",
        "--test",
        "pearson",
    ]);
    assert_eq!(bad.status.code(), Some(2));
    let cfg = dir.path().join("typo.json");
    fs::write(
        &cfg,
        r#"{"process": {"kind": "nonlin_lag1"}, "n": 20, "trails": 3}"#,
    )
    .unwrap();
    assert_eq!(
        tsdep(&["power", "--config", path(&cfg)]).status.code(),
        Some(2)
    );

    let csv = dir.path().join("bad.csv");
    fs::write(&csv, "a,b\n1,2\n3,4\n5,oops\n").unwrap();
    let out = tsdep(&["pairwise", path(&csv), "--header"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 4, column 2"));
    assert_eq!(
        tsdep(&["test", path(&dir.path().join("missing.csv"))])
            .status
            .code(),
        Some(3)
    );

    let short = dir.path().join("short.csv");
    fs::write(&short, "1,2\n3,4\n5,6\n").unwrap();
    let out = tsdep(&["pairwise", path(&short), "--max-lag-search", "5"]);
    assert_eq!(out.status.code(), Some(4));
}
