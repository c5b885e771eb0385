use std::process::{Command, Output};

use serde_json::Value;

fn dgp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dgp")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = dgp(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn dist_values() {
    let v = json(&["dist", "pmf", "--alpha", "1", "--lambda", "1", "--mu", "0", "--x", "0"]);
    assert_eq!(v["result"]["value"], 0.5);
    assert_eq!(v["command"], "dist");
    assert_eq!(v["provenance"]["version"], env!("CARGO_PKG_VERSION"));

    let v = json(&["dist", "dispersion", "--alpha", "3", "--lambda", "0.1"]);
    assert!((v["result"]["value"].as_f64().unwrap() - 16.54).abs() < 0.01);

    // minimal x with cdf >= 0.5 is the support start: cdf(3) = 5/9
    let v = json(&["dist", "quantile", "--alpha", "2", "--lambda", "0.5", "--mu", "3", "--gamma", "0.5"]);
    assert_eq!(v["result"]["value"], 3);

    let v = json(&["dist", "moment", "--alpha", "1.5", "--lambda", "1", "--order", "2"]);
    assert_eq!(v["result"]["value"], "divergent");
}

#[test]
fn dist_grid_rows() {
    let out = dgp(&["--format", "csv", "dist", "cdf", "--alpha", "2", "--lambda", "0.5", "--mu", "1", "--grid", "0..3"]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,value");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "0,0.0");
}

#[test]
fn fit_reports_estimates() {
    let v = json(&["fit", "--data", "bundled:accidents_2003", "--model", "dgp"]);
    let p = &v["result"]["params"];
    assert!((p["alpha"].as_f64().unwrap() - 3.8227).abs() < 1e-3);
    assert!((p["lambda"].as_f64().unwrap() - 0.2295).abs() < 1e-3);
    assert_eq!(p["mu"], 3);
    assert_eq!(v["result"]["converged"], true);

    let v = json(&["fit", "--data", "bundled:deaths_2005", "--model", "dlo"]);
    assert!((v["result"]["params"]["alpha"].as_f64().unwrap() - 5.4875).abs() < 1e-3);
    assert!((v["result"]["params"]["lambda"].as_f64().unwrap() - 0.3811).abs() < 1e-3);
}

#[test]
fn fit_curve_and_file_input() {
    let dir = std::env::temp_dir().join(format!("dgp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let data = dir.join("counts.csv");
    std::fs::write(&data, "value,count\n0,60\n1,20\n2,8\n3,5\n5,4\n9,3\n").unwrap();
    let curve = dir.join("curve.csv");
    let out = dgp(&[
        "fit",
        "--data",
        data.to_str().unwrap(),
        "--model",
        "dlo",
        "--emit-fit-curve",
        curve.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&curve).unwrap();
    assert!(text.starts_with("value,observed,expected\n0,60,"));
    assert_eq!(text.lines().count(), 11);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn degenerate_fit_is_flagged() {
    let dir = std::env::temp_dir().join(format!("dgp-cli-one-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let data = dir.join("one.csv");
    std::fs::write(&data, "value,count\n4,1\n").unwrap();
    let out = dgp(&["fit", "--data", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["converged"], false);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn gof_chi_square() {
    let v = json(&["gof", "--data", "bundled:accidents_2003", "--model", "dgp", "--test", "chi2"]);
    let t = &v["result"]["test"];
    assert!((t["statistic"].as_f64().unwrap() / 17.930 - 1.0).abs() < 0.01);
    assert_eq!(t["df"], 6);
    assert_eq!(t["reject"], true);
}

#[test]
fn gof_ks_is_reproducible() {
    let args = ["gof", "--data", "bundled:deaths_2006", "--model", "dlo", "--test", "ks", "--replicates", "200", "--seed", "42"];
    let a = dgp(&args);
    let b = dgp(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!((v["result"]["statistic"].as_f64().unwrap() - 0.0475).abs() < 1e-3);

    let v = json(&["gof", "--data", "bundled:deaths_2006", "--model", "dlo", "--test", "ks", "--replicates", "1"]);
    let p = v["result"]["p_value"].as_f64().unwrap();
    assert!(p == 0.0 || p == 1.0);
}

#[test]
fn simulate_is_deterministic() {
    let args = ["--format", "csv", "simulate", "--alpha", "2", "--lambda", "0.5", "--mu", "7", "--n", "5", "--seed", "11"];
    let a = dgp(&args);
    assert_eq!(a.stdout, dgp(&args).stdout);
    let text = stdout(&a);
    assert!(text.starts_with("value,count\n"));
    let rows: Vec<(u64, u64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (v, c) = l.split_once(',').unwrap();
            (v.parse().unwrap(), c.parse().unwrap())
        })
        .collect();
    assert!(rows.iter().all(|&(v, _)| v >= 7));
    assert_eq!(rows.iter().map(|r| r.1).sum::<u64>(), 5);
}

#[test]
fn reproduce_exit_codes() {
    let out = dgp(&["reproduce", "--table", "5"]);
    assert_eq!(out.status.code(), Some(0));
    // the alpha = 3 column of the dispersion grid does not round-trip
    let out = dgp(&["reproduce", "--table", "4"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validation_errors_exit_one() {
    let out = dgp(&["dist", "sf", "--alpha", "2", "--lambda", "1", "--mu", "4", "--x", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("below the support"));
    let out = dgp(&["fit", "--data", "bundled:nope"]);
    assert_eq!(out.status.code(), Some(1));
    let out = dgp(&["gof", "--data", "bundled:deaths_2006", "--test", "chi2", "--model", "dlo", "--mu", "3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn data_export_round_trips() {
    let out = dgp(&["--format", "csv", "data", "export", "deaths_2007"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "value,count\n0,693\n1,92\n2,12\n3,4\n6,1\n");
    let v = json(&["data", "list"]);
    assert_eq!(v["result"]["datasets"].as_array().unwrap().len(), 10);
}

#[test]
fn version_flag() {
    let out = dgp(&["--version"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains(env!("CARGO_PKG_VERSION")));
}
