//! Machine-readable reports with a stable schema.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::operator::ParamsSummary;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub residuals: BTreeMap<String, f64>,
    pub slopes: BTreeMap<String, f64>,
    pub details: Value,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        CheckResult {
            name: name.into(),
            pass,
            residuals: BTreeMap::new(),
            slopes: BTreeMap::new(),
            details: Value::Null,
        }
    }

    pub fn residual(mut self, key: &str, value: f64) -> Self {
        self.residuals.insert(key.into(), value);
        self
    }

    pub fn slope(mut self, key: &str, value: f64) -> Self {
        self.slopes.insert(key.into(), value);
        self
    }

    pub fn details(mut self, details: impl Serialize) -> Self {
        self.details = serde_json::to_value(details).unwrap_or(Value::Null);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: String,
    pub inputs_digest: String,
    pub inputs: Value,
    pub params: Option<ParamsSummary>,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl Report {
    pub fn new(command: &str, inputs: Value, params: Option<ParamsSummary>) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            inputs_digest: digest(&inputs),
            inputs,
            params,
            checks: Vec::new(),
            pass: true,
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// SHA-256 of the compact JSON encoding (object keys are sorted).
pub fn digest(inputs: &Value) -> String {
    let text = serde_json::to_string(inputs).expect("value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}
