use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use corrlab_core::MultiplicityMatrix;

use crate::scenario::{Kind, ToleranceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Refused,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Refused => 3,
        }
    }
}

/// Outcome of one scenario. The JSON form is byte-stable for fixed inputs,
/// so the wall-clock duration is kept out of it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub name: String,
    pub kind: Kind,
    pub verdict: Verdict,
    pub seed: u64,
    pub tolerance: ToleranceSpec,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub dimensions: BTreeMap<String, usize>,
    pub residuals: BTreeMap<String, f64>,
    pub matrices: BTreeMap<String, Vec<Vec<u64>>>,
    pub details: BTreeMap<String, Value>,
    #[serde(skip)]
    pub duration: Duration,
}

impl Report {
    pub fn new(name: &str, kind: Kind, seed: u64, tolerance: ToleranceSpec) -> Report {
        Report {
            name: name.to_string(),
            kind,
            verdict: Verdict::Pass,
            seed,
            tolerance,
            version: corrlab_core::VERSION.to_string(),
            message: None,
            dimensions: BTreeMap::new(),
            residuals: BTreeMap::new(),
            matrices: BTreeMap::new(),
            details: BTreeMap::new(),
            duration: Duration::ZERO,
        }
    }

    pub fn dim(&mut self, key: &str, value: usize) {
        self.dimensions.insert(key.to_string(), value);
    }

    pub fn residual(&mut self, key: &str, value: f64) {
        self.residuals.insert(key.to_string(), value);
    }

    pub fn matrix(&mut self, key: &str, m: &MultiplicityMatrix) {
        let rows = (0..m.rows())
            .map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect())
            .collect();
        self.matrices.insert(key.to_string(), rows);
    }

    pub fn detail(&mut self, key: &str, value: impl Into<Value>) {
        self.details.insert(key.to_string(), value.into());
    }

    /// Records a requirement; the first failing one sets the message.
    pub fn require(&mut self, ok: bool, what: &str) {
        if !ok && self.verdict == Verdict::Pass {
            self.verdict = Verdict::Fail;
            self.message = Some(what.to_string());
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let value = serde_json::to_value(self).expect("reports serialize");
        let mut out = String::new();
        render(&value, 0, &mut out);
        let _ = writeln!(out, "duration: {:.3}s", self.duration.as_secs_f64());
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FileError {
    pub file: String,
    pub message: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub verdict: Verdict,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub refused: usize,
    pub scenarios: Vec<Report>,
    pub errors: Vec<FileError>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    #[serde(skip)]
    pub duration: Duration,
}

impl SuiteReport {
    /// Aggregates in scenario-name order; any failure or unreadable file
    /// fails the suite, otherwise any refusal makes it refused.
    pub fn aggregate(mut scenarios: Vec<Report>, mut errors: Vec<FileError>, duration: Duration) -> SuiteReport {
        scenarios.sort_by(|a, b| a.name.cmp(&b.name));
        errors.sort_by(|a, b| a.file.cmp(&b.file));
        let count = |v: Verdict| scenarios.iter().filter(|r| r.verdict == v).count();
        let (passed, failed, refused) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Refused));
        let verdict = if failed > 0 || !errors.is_empty() {
            Verdict::Fail
        } else if refused > 0 {
            Verdict::Refused
        } else {
            Verdict::Pass
        };
        let mut warnings = Vec::new();
        if scenarios.is_empty() && errors.is_empty() {
            warnings.push("no scenarios found".to_string());
        }
        SuiteReport {
            verdict,
            total: scenarios.len() + errors.len(),
            passed,
            failed,
            refused,
            scenarios,
            errors,
            warnings,
            duration,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.scenarios {
            let _ = write!(out, "{:<8} {}", format!("{:?}", r.verdict).to_uppercase(), r.name);
            if let Some(m) = &r.message {
                let _ = write!(out, "  ({m})");
            }
            out.push('\n');
        }
        for e in &self.errors {
            let _ = writeln!(out, "ERROR    {}  ({})", e.file, e.message);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        let _ = writeln!(
            out,
            "{} scenarios: {} passed, {} failed, {} refused, {} unreadable in {:.3}s",
            self.total,
            self.passed,
            self.failed,
            self.refused,
            self.errors.len(),
            self.duration.as_secs_f64()
        );
        out
    }
}

fn render(value: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(inner) if inner.is_empty() => {}
                    Value::Object(_) => {
                        let _ = writeln!(out, "{pad}{k}:");
                        render(v, indent + 1, out);
                    }
                    _ => {
                        let _ = writeln!(out, "{pad}{k}: {}", inline(v));
                    }
                }
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{}", inline(other));
        }
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_u64() && !n.is_i64() => format!("{x:.3e}"),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}
