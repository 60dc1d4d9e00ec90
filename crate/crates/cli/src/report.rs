//! The report document. Field order is fixed by the structs and every map
//! inside `values` is sorted, so rendering is byte-deterministic.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::ConfigEcho;

pub const TOOL: &str = "chevalley";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

/// Invariant failures (axioms, d² ≠ 0) abort downstream checks; identity
/// failures do not.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Invariant,
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub kind: Kind,
    pub status: Status,
    pub summary: String,
    pub window: Value,
    pub witnesses: Vec<Value>,
    pub values: Value,
}

impl CheckResult {
    pub fn skipped(name: &str, kind: Kind, reason: &str) -> Self {
        CheckResult {
            name: name.into(),
            kind,
            status: Status::Skipped,
            summary: reason.into(),
            window: Value::Null,
            witnesses: Vec::new(),
            values: Value::Null,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: ConfigEcho,
    pub status: Status,
    pub aborted_after: Option<String>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn exit_code(&self) -> i32 {
        let failed = |k: Kind| self.checks.iter().any(|c| c.kind == k && c.status == Status::Fail);
        if failed(Kind::Invariant) {
            crate::EXIT_INVARIANT
        } else if failed(Kind::Identity) {
            crate::EXIT_IDENTITY
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}  {}  algebra {}\n", self.tool, self.version, self.command, self.config.algebra);
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            out.push_str(&format!("  [{tag}] {:<16} {}\n", c.name, c.summary));
            for w in &c.witnesses {
                out.push_str(&format!("         witness {w}\n"));
            }
        }
        if let Some(a) = &self.aborted_after {
            out.push_str(&format!("  aborted after {a}\n"));
        }
        out.push_str(&format!("status {}\n", if self.passed() { "pass" } else { "fail" }));
        out
    }
}

/// Human rendering of an exact value, with an approximate decimal for
/// non-integers.
pub fn human(x: &chevalley_core::Q) -> String {
    use num_traits::ToPrimitive;
    if x.is_integer() {
        return x.to_string();
    }
    let approx = x.numer().to_f64().zip(x.denom().to_f64()).map(|(n, d)| n / d);
    match approx {
        Some(a) => format!("{x} (~{a:.6})"),
        None => x.to_string(),
    }
}
