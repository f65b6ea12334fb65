//! The report every subcommand produces.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

use crate::dto::SCHEMA;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }
}

/// Deterministic for fixed inputs: object keys are sorted and timing is
/// reported on stderr only. A counterexample is present iff the status is
/// `fail`.
#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: &'static str,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub counters: BTreeMap<&'static str, usize>,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    /// Human-readable body, printed without `--json`.
    #[serde(skip)]
    pub lines: Vec<String>,
}

impl Report {
    pub fn new(command: &'static str) -> Self {
        Report {
            schema: SCHEMA,
            command,
            status: Status::Pass,
            seed: None,
            counters: BTreeMap::new(),
            result: Value::Null,
            counterexample: None,
            message: None,
            lines: Vec::new(),
        }
    }

    pub fn error(command: &'static str, message: String) -> Self {
        Report {
            status: Status::Error,
            message: Some(message),
            ..Report::new(command)
        }
    }

    pub fn fail(&mut self, counterexample: Value) {
        self.status = Status::Fail;
        self.counterexample = Some(counterexample);
    }

    pub fn count(&mut self, key: &'static str, n: usize) {
        self.counters.insert(key, n);
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn render_text(&self) -> String {
        let mut out = format!("{}: {}\n", self.command, self.status.name());
        if let Some(seed) = self.seed {
            out.push_str(&format!("seed: {seed}\n"));
        }
        if let Some(m) = &self.message {
            out.push_str(&format!("message: {m}\n"));
        }
        for (k, v) in &self.counters {
            out.push_str(&format!("{k}: {v}\n"));
        }
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }

    pub fn render_json(&self, pretty: bool) -> String {
        let s = if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        };
        s.expect("report values are plain JSON") + "\n"
    }
}
