// SPDX-License-Identifier: Apache-2.0

//! The self-describing report every command emits.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: BTreeMap<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// `pass` or `fail`.
    pub outcome: &'static str,
    pub result: Value,
    pub constants: BTreeMap<String, Value>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            tool: "kolmonet",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config: BTreeMap::new(),
            seed: None,
            outcome: "pass",
            result: Value::Null,
            constants: BTreeMap::new(),
            warnings: Vec::new(),
        }
    }

    pub fn config(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.config.insert(key.to_string(), to_value(value));
        self
    }

    pub fn constant(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        self.constants.insert(key.to_string(), to_value(value));
        self
    }

    pub fn result(&mut self, value: impl Serialize) -> &mut Self {
        self.result = to_value(value);
        self
    }

    pub fn warn(&mut self, w: impl Into<String>) -> &mut Self {
        self.warnings.push(w.into());
        self
    }

    pub fn fail_if(&mut self, failed: bool) -> &mut Self {
        if failed {
            self.outcome = "fail";
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.outcome == "pass"
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}
