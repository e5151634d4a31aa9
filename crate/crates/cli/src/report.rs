use std::path::PathBuf;

use serde::Serialize;
use serde_json::Value;

/// One verified invariant: `value ≤ tol`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Verification {
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Verification {
    pub fn new() -> Self {
        Self {
            pass: true,
            checks: Vec::new(),
        }
    }

    pub fn at_most(&mut self, name: &str, value: f64, tol: f64) {
        let pass = value <= tol;
        self.pass &= pass;
        self.checks.push(Check {
            name: name.to_string(),
            value,
            tol,
            pass,
        });
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Scenario {
    pub kind: String,
    pub inputs: Value,
    pub options: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: Scenario,
    pub outputs: Vec<PathBuf>,
    pub verification: Verification,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}
