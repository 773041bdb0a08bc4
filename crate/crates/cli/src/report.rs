//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

/// One named check. A failed check always carries the input that broke it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub detail: String,
}

impl Check {
    /// Passes when `residual < threshold`; a NaN residual fails.
    pub fn bound(name: impl Into<String>, residual: f64, threshold: f64, witness: impl Into<String>, detail: impl Into<String>) -> Self {
        let passed = residual < threshold;
        Self {
            name: name.into(),
            passed,
            residual: Some(residual),
            threshold: Some(threshold),
            witness: Some(witness.into()),
            detail: detail.into(),
        }
    }

    pub fn holds(name: impl Into<String>, passed: bool, witness: impl Into<String>, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, residual: None, threshold: None, witness: Some(witness.into()), detail: detail.into() }
    }

    pub fn failed(name: impl Into<String>, witness: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self::holds(name, false, witness, err.to_string())
    }

    /// Drop the witness of a passing check so reports only point at problems.
    fn tidy(mut self) -> Self {
        if self.passed {
            self.witness = None;
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Only present with `--timings`, so default reports are reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl VerifyReport {
    pub fn new(suite: &str, checks: Vec<Check>) -> Self {
        let checks: Vec<Check> = checks.into_iter().map(Check::tidy).collect();
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        Self { suite: suite.to_string(), passed, checks, wall_time_s: None }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}
