//! Versioned JSON report shared by the CLI and the Python bindings.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "qcx-report-v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub version: String,
    pub command: String,
    pub config: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub records: Option<Value>,
    /// Seconds; the only field that varies between identical runs.
    pub wall_time: f64,
}

impl Report {
    pub fn new(command: impl Into<String>, config: Value, result: Value) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            config,
            result,
            records: None,
            wall_time: 0.0,
        }
    }

    pub fn with_records(mut self, records: Value) -> Self {
        self.records = Some(records);
        self
    }

    pub fn to_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }

    /// The report with `wall_time` zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            wall_time: 0.0,
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip_and_timing_strip() {
        let mut r = Report::new("classify", json!({"q": 1}), json!({"q_index": 1}));
        r.wall_time = 1.5;
        let back: Report = serde_json::from_str(&r.to_pretty()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.schema, SCHEMA);
        assert_eq!(r.without_timing().wall_time, 0.0);
        assert!(!r.to_pretty().contains("records"));
    }
}
