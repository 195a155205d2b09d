use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
    #[serde(default)]
    pub witness: Option<Value>,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
        let status = if pass { Status::Pass } else { Status::Fail };
        Check { name: name.into(), status, detail: detail.into(), witness: None }
    }

    pub fn pass(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check::new(name, true, detail)
    }

    pub fn error(name: impl Into<String>, detail: impl Into<String>) -> Check {
        Check { name: name.into(), status: Status::Error, detail: detail.into(), witness: None }
    }

    pub fn with_witness(mut self, w: impl Into<Value>) -> Check {
        self.witness = Some(w.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub error: usize,
    pub exit_code: i32,
}

/// The JSON document printed by every subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub args: Vec<String>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub summary: Summary,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn new(command: &str, args: Vec<String>, checks: Vec<Check>, result: Option<Value>, elapsed_ms: u64) -> Report {
        let count = |s: Status| checks.iter().filter(|c| c.status == s).count();
        let (pass, fail, error) = (count(Status::Pass), count(Status::Fail), count(Status::Error));
        let exit_code = if fail + error > 0 { 1 } else { 0 };
        Report {
            command: command.to_string(),
            args,
            checks,
            result,
            summary: Summary { pass, fail, error, exit_code },
            elapsed_ms,
        }
    }

    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }
}
