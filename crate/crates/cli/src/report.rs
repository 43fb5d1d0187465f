//! The JSON report: `{command, inputs, seed, results, elapsed}`.

use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Informational value, not an asserted check.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, passed: bool) -> Self {
        CheckResult {
            name: name.into(),
            status: if passed { Status::Pass } else { Status::Fail },
            witness: None,
            value: None,
            tolerance: None,
        }
    }

    pub fn info(name: impl Into<String>, value: impl Serialize) -> Self {
        CheckResult { status: Status::Info, ..Self::new(name, true) }.with_value(value)
    }

    pub fn with_value(mut self, value: impl Serialize) -> Self {
        self.value = Some(serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
        self
    }

    pub fn with_witness(mut self, witness: impl Into<String>) -> Self {
        self.witness = Some(witness.into());
        self
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = Some(tol);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub seed: u64,
    pub results: Vec<CheckResult>,
    /// Wall time in seconds; only filled with `--timing` so reports stay reproducible.
    pub elapsed: Option<f64>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per result, derived from the JSON fields.
    pub fn summary(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, if self.passed() { "PASS" } else { "FAIL" });
        for r in &self.results {
            let tag = match r.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Info => "info",
            };
            out.push_str(&format!("  [{tag}] {}", r.name));
            if let Some(v) = &r.value {
                out.push_str(&format!(" = {v}"));
            }
            if let Some(t) = r.tolerance {
                out.push_str(&format!(" (tol {t:e})"));
            }
            if let Some(w) = &r.witness {
                out.push_str(&format!(" witness: {w}"));
            }
            out.push('\n');
        }
        out
    }
}
