//! Machine-readable run reports.
//!
//! Reports are deterministic for a fixed (config, seed) except for the
//! `wall_time_ms` field; complex numbers appear as `[re, im]` arrays. The
//! published schema lives at `docs/report.schema.json`.

use serde::Serialize;
use serde_json::Value;

use crate::scalar::C64;

/// One asserted check: `pass` iff `value <= threshold` (a missing value means
/// the check could not be evaluated and fails).
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn residual(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            value: Some(value),
            threshold,
            pass: value <= threshold,
        }
    }

    /// Equality of two counts, encoded as |got - want| <= 0.
    pub fn equality(name: impl Into<String>, got: usize, want: usize) -> Self {
        let diff = (got as f64 - want as f64).abs();
        Check {
            name: name.into(),
            value: Some(diff),
            threshold: 0.0,
            pass: got == want,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub format_version: u32,
    pub subcommand: String,
    /// Echo of the parsed, normalized configuration.
    pub config: Value,
    pub seed: u64,
    /// Residual tolerance applied to the primary checks of this subcommand.
    pub tolerance: f64,
    pub dimension: usize,
    pub notices: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub results: Value,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub wall_time_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialization");
        s.push('\n');
        s
    }
}

/// `[re, im]` encoding of a complex scalar.
pub fn cx(c: C64) -> Value {
    serde_json::json!([c.re, c.im])
}

pub fn cx_list(cs: &[C64]) -> Value {
    Value::Array(cs.iter().map(|&c| cx(c)).collect())
}
