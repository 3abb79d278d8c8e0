use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// One verified invariant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub value: f64,
    /// Threshold the value was compared against, if any.
    pub bound: Option<f64>,
    /// Where the worst case occurred, or other context for the value.
    pub witness: Value,
}

impl Check {
    /// `value ≤ bound`.
    pub fn at_most(name: &str, value: f64, bound: f64, witness: Value) -> Self {
        Self::new(name, value <= bound, value, Some(bound), witness)
    }

    /// `value ≥ bound`.
    pub fn at_least(name: &str, value: f64, bound: f64, witness: Value) -> Self {
        Self::new(name, value >= bound, value, Some(bound), witness)
    }

    /// A yes/no condition, recorded as 1 or 0.
    pub fn flag(name: &str, pass: bool, witness: Value) -> Self {
        Self::new(name, pass, if pass { 1.0 } else { 0.0 }, None, witness)
    }

    /// A reported quantity without a threshold.
    pub fn info(name: &str, value: f64, witness: Value) -> Self {
        Self::new(name, true, value, None, witness)
    }

    fn new(name: &str, pass: bool, value: f64, bound: Option<f64>, witness: Value) -> Self {
        // JSON has no infinities; keep the number finite and say so.
        let (value, witness) = if value.is_finite() {
            (value, witness)
        } else {
            (f64::MAX.copysign(value), serde_json::json!({ "nonfinite": value.to_string(), "detail": witness }))
        };
        Self { name: name.into(), pass: pass && !value.is_nan(), value, bound, witness }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub tol: f64,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(command: &str, tol: f64, seed: u64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { command: command.into(), tol, seed, pass, checks }
    }

    pub fn write(&self, out: Option<&Path>) -> std::io::Result<()> {
        let mut text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        text.push('\n');
        match out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        }
    }
}
