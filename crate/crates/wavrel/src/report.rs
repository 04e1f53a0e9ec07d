//! The versioned run report.

use serde::Serialize;
use serde_json::{Map, Value};

pub const SCHEMA: &str = "wavrel.report/v1";

#[derive(Debug, Serialize)]
pub struct Suite {
    pub name: String,
    pub pass: bool,
    /// Truncated or sampled certificate standing in for an exact statement.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub surrogate: Option<String>,
    pub tolerance: Option<f64>,
    pub residuals: Map<String, Value>,
    pub dims: Map<String, Value>,
}

impl Suite {
    pub fn new(name: &str, pass: bool) -> Suite {
        Suite { name: name.into(), pass, surrogate: None, tolerance: None, residuals: Map::new(), dims: Map::new() }
    }

    pub fn tol(mut self, tol: f64) -> Suite {
        self.tolerance = Some(tol);
        self
    }

    pub fn surrogate(mut self, note: &str) -> Suite {
        self.surrogate = Some(note.into());
        self
    }

    pub fn residual(mut self, key: &str, v: f64) -> Suite {
        self.residuals.insert(key.into(), float(v));
        self
    }

    pub fn dim(mut self, key: &str, v: usize) -> Suite {
        self.dims.insert(key.into(), Value::from(v));
        self
    }
}

/// Non-finite values become strings rather than silently turning into null.
pub fn float(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::String(v.to_string())
    }
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool_version: &'static str,
    pub command: Vec<String>,
    pub domain_hash: Option<String>,
    pub seed: u64,
    pub pass: bool,
    pub suites: Vec<Suite>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Wall-clock per stage; only present with `--timings`, since it breaks
    /// byte-identical output.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Vec<Timing>>,
}

impl RunReport {
    pub fn new(command: Vec<String>, seed: u64) -> RunReport {
        RunReport {
            schema: SCHEMA,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            domain_hash: None,
            seed,
            pass: true,
            suites: Vec::new(),
            result: Value::Object(Map::new()),
            error: None,
            timings: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
