use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn dunkl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl"))
        .args(args)
        .env_remove("DUNKL_CONFIG")
        .output()
        .expect("dunkl runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn scratch(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn passing_suite_exits_zero_with_a_json_report() {
    let o = dunkl(&["verify", "--suite", "kernels", "--k", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["summary"]["fail"], 0);
    let checks = report["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["id"].as_str().unwrap().starts_with("kernels.")));
    assert_eq!(report["suites"][0]["suite"], "kernels");
}

#[test]
fn failing_checks_exit_one() {
    let o = dunkl(&["verify", "--suite", "kernels", "--k", "0.5", "--tol", "1e-300"]);
    assert_eq!(o.status.code(), Some(1));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["summary"]["fail"].as_u64().unwrap() > 0);
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--suite", "nope"][..],
        &["--bogus"][..],
        &["verify", "--k", "-1"][..],
        &["eval", "heat_kernel", "--t", "1", "--grid", "2:4:smooth"][..],
        &["norm", "lp", "--input", "gaussian", "--p", "0.5"][..],
    ] {
        let o = dunkl(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn csv_report_has_one_row_per_check() {
    let o = dunkl(&["verify", "--suite", "kernels", "--k", "0", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "id,reference,computed,expected_kind,expected_a,expected_b,verdict,runtime_ms");
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.starts_with("kernels.")));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let cfg = scratch("cli_config.toml");
    std::fs::write(&cfg, "k = 1.5\nsuite = [\"kernels\"]\nformat = \"csv\"\n").unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_dunkl"))
            .arg("verify")
            .args(extra)
            .env("DUNKL_CONFIG", &cfg)
            .output()
            .unwrap()
    };
    let from_file = stdout(&run(&[]));
    assert!(from_file.starts_with("id,"));
    assert!(from_file.lines().skip(1).all(|r| r.contains("k=1.5")));
    let over = run(&["--k", "0", "--format", "json"]);
    let report: Value = serde_json::from_str(&stdout(&over)).unwrap();
    assert_eq!(report["config"]["k"], 0.0);
    assert_eq!(report["config"]["suite"][0], "kernels");

    std::fs::write(&cfg, "colour = 1\n").unwrap();
    assert_eq!(run(&[]).status.code(), Some(2));
}

#[test]
fn out_flag_writes_the_report_to_a_file() {
    let path = scratch("cli_report.json");
    let _ = std::fs::remove_file(&path);
    let o = dunkl(&["verify", "--suite", "kernels", "--k", "0", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["summary"]["fail"], 0);
}

#[test]
fn eval_samples_the_heat_kernel() {
    let o = dunkl(&["eval", "heat_kernel", "--t", "1", "--k", "0.5", "--grid", "2:8:smooth"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('x'))
        .map(|l| {
            let mut it = l.split(',').map(|v| v.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .collect();
    assert!(!rows.is_empty());
    for (x, v) in rows {
        let want = 0.5 * (-x * x / 4.0).exp();
        assert!((v - want).abs() <= 1e-14, "F_1({x}) = {v}, want {want}");
    }
}

#[test]
fn eval_dunkl_kernel_has_an_imaginary_column() {
    let o = dunkl(&["eval", "dunkl_kernel", "--lambda=-1i", "--k", "0.5", "--grid", "1:8:smooth"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "x,value,im_value"));
}

#[test]
fn norm_lp_reports_the_gaussian_norm() {
    let o = dunkl(&["norm", "lp", "--input", "gaussian", "--p", "2", "--k", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let got = v["value"].as_f64().unwrap();
    assert!((got - 0.5f64.sqrt()).abs() <= 1e-12, "{got}");
}
