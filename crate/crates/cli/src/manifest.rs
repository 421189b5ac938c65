use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inapplicable,
}

impl Status {
    pub fn from_bool(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inapplicable => "n/a ",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, status: Status, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status,
            detail: detail.into(),
        }
    }
}

/// Record of one command run. Everything except `wall_ms` (and timing
/// fields inside `payload`) is a function of the inputs.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub version: String,
    pub wall_ms: u64,
    pub summary: String,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub payload: Value,
    /// Extra text printed in the human-readable form only.
    #[serde(skip)]
    pub text: String,
    #[serde(skip)]
    pub budget_exhausted: bool,
}

const TIMING_KEYS: [&str; 3] = ["wall_ms", "canonical_us", "elapsed_ms"];

fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for (k, x) in map.iter_mut() {
                if TIMING_KEYS.contains(&k.as_str()) {
                    *x = Value::from(0);
                } else {
                    strip_timing(x);
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.into(),
            parameters: BTreeMap::new(),
            version: lineconf::VERSION.into(),
            wall_ms: 0,
            summary: String::new(),
            checks: Vec::new(),
            payload: Value::Null,
            text: String::new(),
            budget_exhausted: false,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(
            key.into(),
            serde_json::to_value(value).expect("parameter serializes"),
        );
        self
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn failed(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.status == Status::Fail)
            .count()
    }

    /// Fills in the summary from the check counts unless one was set.
    pub fn finish(&mut self) {
        if self.summary.is_empty() {
            let count = |s| self.checks.iter().filter(|c| c.status == s).count();
            self.summary = format!(
                "{} passed, {} failed, {} inapplicable",
                count(Status::Pass),
                count(Status::Fail),
                count(Status::Inapplicable)
            );
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.failed() > 0 {
            1
        } else if self.budget_exhausted {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self, with_timing: bool) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if !with_timing {
            strip_timing(&mut v);
        }
        serde_json::to_string_pretty(&v).expect("manifest serializes") + "\n"
    }

    pub fn to_text(&self, with_timing: bool) -> String {
        let mut s = format!("command: {}\n", self.command);
        for (k, v) in &self.parameters {
            s.push_str(&format!("  {k}: {v}\n"));
        }
        s.push_str(&self.text);
        for c in &self.checks {
            s.push_str(&format!("[{}] {}", c.status.tag(), c.name));
            if !c.detail.is_empty() {
                s.push_str(&format!(": {}", c.detail));
            }
            s.push('\n');
        }
        s.push_str(&format!("summary: {}\n", self.summary));
        if with_timing {
            s.push_str(&format!("wall time: {} ms\n", self.wall_ms));
        }
        s
    }
}
