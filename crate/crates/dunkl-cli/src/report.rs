//! Check records and their JSON and CSV renderings.

use std::fmt::Write as _;

use serde::Serialize;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Info,
}

/// What the computed value is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Expected {
    /// `|computed - value| ≤ tol`.
    Abs { value: f64, tol: f64 },
    /// `|computed - value| ≤ tol |value|`.
    Rel { value: f64, tol: f64 },
    /// `lo ≤ computed ≤ hi`.
    Window { lo: f64, hi: f64 },
    /// `computed ≤ bound`.
    AtMost { bound: f64 },
    /// `computed < bound`.
    Below { bound: f64 },
    /// `computed` is finite.
    Finite,
    /// Reported only.
    Info,
}

impl Expected {
    pub fn verdict(&self, computed: f64) -> Verdict {
        let ok = match *self {
            Expected::Abs { value, tol } => (computed - value).abs() <= tol,
            Expected::Rel { value, tol } => (computed - value).abs() <= tol * value.abs(),
            Expected::Window { lo, hi } => lo <= computed && computed <= hi,
            Expected::AtMost { bound } => computed <= bound,
            Expected::Below { bound } => computed < bound,
            Expected::Finite => computed.is_finite(),
            Expected::Info => return Verdict::Info,
        };
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Replaces the tolerance of identity checks.
    pub fn with_tol(self, tol: f64) -> Self {
        match self {
            Expected::Abs { value, .. } => Expected::Abs { value, tol },
            Expected::Rel { value, .. } => Expected::Rel { value, tol },
            e => e,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Expected::Abs { .. } => "abs",
            Expected::Rel { .. } => "rel",
            Expected::Window { .. } => "window",
            Expected::AtMost { .. } => "at_most",
            Expected::Below { .. } => "below",
            Expected::Finite => "finite",
            Expected::Info => "info",
        }
    }

    /// `(a, b)`: value and tolerance, the window, or the bound and NaN.
    fn columns(&self) -> (f64, f64) {
        match *self {
            Expected::Abs { value, tol } | Expected::Rel { value, tol } => (value, tol),
            Expected::Window { lo, hi } => (lo, hi),
            Expected::AtMost { bound } | Expected::Below { bound } => (bound, f64::NAN),
            Expected::Finite | Expected::Info => (f64::NAN, f64::NAN),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub id: String,
    /// The identity or inequality being checked, in words and symbols.
    pub reference: String,
    pub computed: f64,
    pub expected: Expected,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub runtime_ms: u64,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, reference: impl Into<String>, computed: f64, expected: Expected) -> Self {
        Self {
            id: id.into(),
            reference: reference.into(),
            computed,
            verdict: expected.verdict(computed),
            expected,
            note: None,
            runtime_ms: 0,
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// A check that could not be evaluated.
    pub fn error(id: impl Into<String>, reference: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self {
            id: id.into(),
            reference: reference.into(),
            computed: f64::NAN,
            expected: Expected::Finite,
            verdict: Verdict::Fail,
            note: Some(format!("error: {err}")),
            runtime_ms: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub info: usize,
}

/// Wall time of one suite within a run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteTiming {
    pub suite: String,
    pub checks: usize,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub tool: String,
    pub version: String,
    pub config: serde_json::Value,
    pub summary: Summary,
    pub suites: Vec<SuiteTiming>,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    /// Sorts the checks by id and tallies the verdicts.
    pub fn new(config: serde_json::Value, suites: Vec<SuiteTiming>, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let mut summary = Summary::default();
        for c in &checks {
            match c.verdict {
                Verdict::Pass => summary.pass += 1,
                Verdict::Fail => summary.fail += 1,
                Verdict::Info => summary.info += 1,
            }
        }
        Self {
            schema: SCHEMA_VERSION,
            tool: "dunkl".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config,
            summary,
            suites,
            checks,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,reference,computed,expected_kind,expected_a,expected_b,verdict,runtime_ms\n");
        for c in &self.checks {
            let (a, b) = c.expected.columns();
            let verdict = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Info => "INFO",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&c.id),
                csv_field(&c.reference),
                fmt17(c.computed),
                c.expected.kind(),
                fmt17(a),
                fmt17(b),
                verdict,
                c.runtime_ms
            );
        }
        out
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt17(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The report with every `runtime_ms` value blanked, for run-to-run comparison.
pub fn strip_runtime(report: &str) -> String {
    report
        .lines()
        .map(|line| {
            if let Some(i) = line.find("\"runtime_ms\":") {
                let tail = &line[i..];
                let end = tail.find(',').map(|j| i + j).unwrap_or(line.len());
                format!("{}\"runtime_ms\":_{}", &line[..i], &line[end..])
            } else {
                line.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n")
}
