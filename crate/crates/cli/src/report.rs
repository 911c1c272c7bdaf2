use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// JSON Schema of [`Report`].
pub const REPORT_SCHEMA: &str = include_str!("../report.schema.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub max_residual: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `max_residual` is finite and at most `tolerance`.
    pub fn bound(name: impl Into<String>, tolerance: f64, max_residual: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            max_residual,
            pass: max_residual.is_finite() && max_residual <= tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    /// Computed quantities that are not pass/fail.
    pub values: BTreeMap<String, Value>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            values: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.parameters.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn value(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.values.insert(key.into(), serde_json::to_value(value).unwrap_or(Value::Null));
        self
    }

    pub fn check(&mut self, check: Check) -> &mut Self {
        self.pass &= check.pass;
        self.checks.push(check);
        self
    }

    /// Records a failure that prevented a check from being evaluated.
    pub fn failed(&mut self, name: &str, tolerance: f64, reason: &str) -> &mut Self {
        self.value(&format!("{name}.error"), reason);
        self.check(Check {
            name: name.into(),
            tolerance,
            max_residual: f64::INFINITY,
            pass: false,
        })
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut text = serde_json::to_string_pretty(&json_safe(self)).expect("report serializes");
        text.push('\n');
        text.into_bytes()
    }
}

/// Non-finite residuals are written as `null`.
fn json_safe(report: &Report) -> Value {
    let mut v = serde_json::to_value(report).expect("report serializes");
    if let Some(checks) = v.get_mut("checks").and_then(Value::as_array_mut) {
        for (c, src) in checks.iter_mut().zip(&report.checks) {
            if !src.max_residual.is_finite() {
                c["max_residual"] = Value::Null;
            }
        }
    }
    v
}
