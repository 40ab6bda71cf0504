use std::collections::BTreeMap;
use std::fmt;

use fundist_core::Error;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Exit {
    Pass = 0,
    Input = 1,
    RigAxioms = 2,
    Resource = 3,
    Theorem = 4,
}

/// A failure carrying its exit code and machine-readable reason.
#[derive(Debug, Clone)]
pub struct Failure {
    pub exit: Exit,
    pub reason: String,
    pub message: String,
}

impl Failure {
    pub fn new(exit: Exit, reason: &str, message: impl Into<String>) -> Self {
        Failure {
            exit,
            reason: reason.to_string(),
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        Failure::new(Exit::Input, "input", message)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.message, self.reason)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Input(_) | Error::Unsupported(_) => Exit::Input,
            Error::Resource(_) => Exit::Resource,
            Error::Consistency(_) | Error::TheoremViolation(_) | Error::ContextRejected(_) => {
                Exit::Theorem
            }
        };
        Failure::new(exit, e.reason(), e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Arguments and file contents that determine a run.
#[derive(Debug, Default, Clone, Serialize)]
pub struct Inputs {
    pub args: BTreeMap<String, Value>,
    pub files: BTreeMap<String, String>,
    pub digest: String,
}

impl Inputs {
    pub fn arg(&mut self, key: &str, value: impl Serialize) {
        self.args.insert(
            key.to_string(),
            serde_json::to_value(value).expect("argument serializes"),
        );
    }

    pub fn file(&mut self, path: &str, contents: &[u8]) {
        self.files.insert(path.to_string(), sha256_hex(contents));
    }

    fn seal(&mut self) {
        let canonical = serde_json::to_vec(&json!({ "args": self.args, "files": self.files }))
            .expect("inputs serialize");
        self.digest = sha256_hex(&canonical);
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Inputs,
    pub results: Value,
    pub exactness: String,
    pub elapsed_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Report {
    pub fn new(
        command: &str,
        mut inputs: Inputs,
        results: Value,
        exactness: impl Into<String>,
    ) -> Self {
        inputs.seal();
        Report {
            command: command.to_string(),
            inputs,
            results,
            exactness: exactness.into(),
            elapsed_ms: 0,
            reason: None,
            error: None,
        }
    }

    pub fn failed(command: &str, inputs: Inputs, failure: &Failure) -> Self {
        let mut r = Report::new(command, inputs, json!({}), "none");
        r.reason = Some(failure.reason.clone());
        r.error = Some(failure.message.clone());
        r
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// A finished command: the report plus the exit code it implies.
pub struct Outcome {
    pub report: Report,
    pub exit: Exit,
    /// Human-readable lines for the default output mode.
    pub lines: Vec<String>,
}

impl Outcome {
    pub fn pass(report: Report, lines: Vec<String>) -> Self {
        Outcome {
            report,
            exit: Exit::Pass,
            lines,
        }
    }

    pub fn fail(mut report: Report, exit: Exit, reason: &str, lines: Vec<String>) -> Self {
        report.reason = Some(reason.to_string());
        Outcome {
            report,
            exit,
            lines,
        }
    }
}
