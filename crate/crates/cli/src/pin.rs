//! Regression pinning against a stored report.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::report::Report;

#[derive(Debug, thiserror::Error)]
pub enum PinError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: baseline is not valid JSON: {source}")]
    Parse { path: String, source: serde_json::Error },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiffEntry {
    pub key: String,
    pub baseline: Option<Value>,
    pub current: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diff {
    /// The baseline did not exist and was written from this report.
    pub created: bool,
    pub entries: Vec<DiffEntry>,
}

impl Diff {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_divergent_key(&self) -> Option<&str> {
        self.entries.first().map(|e| e.key.as_str())
    }
}

/// Compares `report` with the baseline at `path`, writing it if missing.
/// Values are exact, so any difference is drift.
pub fn pin_regression(report: &Report, path: &Path) -> Result<Diff, PinError> {
    let io = |source| PinError::Io { path: path.display().to_string(), source };
    if !path.exists() {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        std::fs::write(path, report.to_json()).map_err(io)?;
        return Ok(Diff { created: true, entries: Vec::new() });
    }
    let text = std::fs::read_to_string(path).map_err(io)?;
    let baseline: Value = serde_json::from_str(&text).map_err(|source| PinError::Parse { path: path.display().to_string(), source })?;
    let current = serde_json::to_value(report).expect("report serializes");
    let mut entries = Vec::new();
    diff_values("", &baseline, &current, &mut entries);
    Ok(Diff { created: false, entries })
}

fn child(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

/// Array elements carrying a `name` are addressed by it.
fn element_key(path: &str, i: usize, v: &Value) -> String {
    match v.get("name").and_then(Value::as_str) {
        Some(n) => format!("{path}[{n}]"),
        None => format!("{path}[{i}]"),
    }
}

/// Depth-first; object keys in sorted order, arrays in index order.
pub fn diff_values(path: &str, a: &Value, b: &Value, out: &mut Vec<DiffEntry>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                match y.get(k) {
                    Some(vb) => diff_values(&child(path, k), va, vb, out),
                    None => out.push(DiffEntry { key: child(path, k), baseline: Some(va.clone()), current: None }),
                }
            }
            for (k, vb) in y {
                if !x.contains_key(k) {
                    out.push(DiffEntry { key: child(path, k), baseline: None, current: Some(vb.clone()) });
                }
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            for i in 0..x.len().max(y.len()) {
                match (x.get(i), y.get(i)) {
                    (Some(va), Some(vb)) => diff_values(&element_key(path, i, va), va, vb, out),
                    (Some(va), None) => out.push(DiffEntry { key: element_key(path, i, va), baseline: Some(va.clone()), current: None }),
                    (None, Some(vb)) => out.push(DiffEntry { key: element_key(path, i, vb), baseline: None, current: Some(vb.clone()) }),
                    (None, None) => unreachable!(),
                }
            }
        }
        _ if a == b => {}
        _ => out.push(DiffEntry { key: path.to_string(), baseline: Some(a.clone()), current: Some(b.clone()) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn named_elements() {
        let a = json!({ "checks": [{ "name": "ce", "values": [1, 2] }] });
        let b = json!({ "checks": [{ "name": "ce", "values": [1, 3] }] });
        let mut out = Vec::new();
        diff_values("", &a, &b, &mut out);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].key, "checks[ce].values[1]");
        out.clear();
        diff_values("", &a, &a, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn missing_keys() {
        let mut out = Vec::new();
        diff_values("", &json!({ "a": 1 }), &json!({ "b": 1 }), &mut out);
        assert_eq!(out.iter().map(|e| e.key.as_str()).collect::<Vec<_>>(), vec!["a", "b"]);
    }
}
