//! Acceptance gate: two full `dunkl verify --suite all` runs, one PASS/FAIL line per criterion.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dunkl_cli::report::strip_runtime;
use serde_json::Value;

struct Criterion {
    number: u32,
    title: &'static str,
    suite: &'static str,
    budget: Duration,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { number: 1, title: "kernel masses", suite: "kernels", budget: Duration::from_secs(10) },
    Criterion { number: 2, title: "kernel transforms", suite: "transforms", budget: Duration::from_secs(30) },
    Criterion { number: 3, title: "Plancherel and derivative exchange", suite: "plancherel", budget: Duration::from_secs(30) },
    Criterion { number: 4, title: "semigroups", suite: "semigroups", budget: Duration::from_secs(60) },
    Criterion { number: 5, title: "PDE residuals", suite: "pde", budget: Duration::from_secs(20) },
    Criterion { number: 6, title: "potential algebra", suite: "potentials", budget: Duration::from_secs(120) },
    Criterion { number: 7, title: "Bessel kernel asymptotics", suite: "asymptotics", budget: Duration::from_secs(5) },
    Criterion { number: 8, title: "decay and smoothing", suite: "decay", budget: Duration::from_secs(60) },
    Criterion { number: 9, title: "norm-equivalence windows", suite: "equivalences", budget: Duration::from_secs(600) },
    Criterion { number: 10, title: "embedding inequalities", suite: "embeddings", budget: Duration::from_secs(300) },
];

const DETERMINISM_BUDGET: Duration = Duration::from_secs(25 * 60);
const MIN_SWEEP_POINTS: usize = 12;

fn verify_all(out: &Path) -> (Duration, i32) {
    let start = Instant::now();
    let status = Command::new(env!("CARGO_BIN_EXE_dunkl"))
        .args(["verify", "--suite", "all", "--format", "json", "--out"])
        .arg(out)
        .env_remove("DUNKL_CONFIG")
        .status()
        .expect("dunkl runs");
    (start.elapsed(), status.code().unwrap_or(-1))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

fn suite_of(check: &Value) -> &str {
    check["id"].as_str().and_then(|id| id.split('.').next()).unwrap_or("")
}

/// `(graded, failed ids)` for one suite.
fn tally<'a>(checks: &'a [Value], suite: &str) -> (usize, Vec<&'a str>) {
    let mut graded = 0;
    let mut failed = Vec::new();
    for c in checks.iter().filter(|c| suite_of(c) == suite) {
        match c["verdict"].as_str() {
            Some("INFO") => {}
            Some("PASS") => graded += 1,
            _ => {
                graded += 1;
                failed.push(c["id"].as_str().unwrap_or("?"));
            }
        }
    }
    (graded, failed)
}

fn suite_runtime(report: &Value, suite: &str) -> Option<Duration> {
    report["suites"]
        .as_array()?
        .iter()
        .find(|s| s["suite"] == suite)
        .and_then(|s| s["runtime_ms"].as_u64())
        .map(Duration::from_millis)
}

fn main() {
    let (a, b) = (scratch("acceptance_run1.json"), scratch("acceptance_run2.json"));
    let (t1, code1) = verify_all(&a);
    let (t2, code2) = verify_all(&b);
    let text1 = std::fs::read_to_string(&a).expect("first report written");
    let text2 = std::fs::read_to_string(&b).expect("second report written");
    let report: Value = serde_json::from_str(&text1).expect("report is JSON");
    assert_eq!(report["schema"], 1);
    let checks = report["checks"].as_array().expect("checks array").clone();

    let mut all_pass = true;
    for c in &CRITERIA {
        let (graded, failed) = tally(&checks, c.suite);
        let runtime = suite_runtime(&report, c.suite);
        let mut problems = Vec::new();
        if graded == 0 {
            problems.push("no graded checks".to_string());
        }
        if !failed.is_empty() {
            problems.push(format!("{} failed: {}", failed.len(), failed.join(", ")));
        }
        match runtime {
            Some(t) if t > c.budget => problems.push(format!("{:.1} s over the {} s budget", t.as_secs_f64(), c.budget.as_secs())),
            None => problems.push("no suite timing".to_string()),
            _ => {}
        }
        if c.suite == "equivalences" {
            let points = checks
                .iter()
                .filter(|r| suite_of(r) == "equivalences" && !r["id"].as_str().unwrap_or("").ends_with(".stability"))
                .count();
            if points < MIN_SWEEP_POINTS {
                problems.push(format!("{points} sweep points, need {MIN_SWEEP_POINTS}"));
            }
        }
        let secs = runtime.map_or(f64::NAN, |t| t.as_secs_f64());
        if problems.is_empty() {
            println!("criterion {:>2} PASS  {} ({graded} checks, {secs:.1} s)", c.number, c.title);
        } else {
            all_pass = false;
            println!("criterion {:>2} FAIL  {}: {}", c.number, c.title, problems.join("; "));
        }
    }

    let identical = strip_runtime(&text1) == strip_runtime(&text2);
    let total = t1 + t2;
    let deterministic = identical && total <= DETERMINISM_BUDGET && code1 == code2;
    if deterministic {
        println!("criterion 11 PASS  determinism ({:.1} s for two runs)", total.as_secs_f64());
    } else {
        all_pass = false;
        println!(
            "criterion 11 FAIL  determinism: identical={identical}, exit codes {code1}/{code2}, {:.1} s for two runs",
            total.as_secs_f64()
        );
    }
    if !all_pass {
        eprintln!("acceptance criteria failed");
        std::process::exit(1);
    }
}
