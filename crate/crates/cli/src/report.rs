use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Always present on failure: the simplex, constraint or point at fault.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

/// Outcome of one CLI run. Everything except `elapsed_ms` is a function of
/// the arguments and input bytes.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub summary: String,
    /// Process exit code: 0 success, 2 precondition failure, 3 internal.
    pub status: u8,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<CheckOutcome>,
    pub elapsed_ms: u128,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunReport {
    pub fn new(command: Vec<String>) -> Self {
        RunReport {
            command,
            summary: String::new(),
            status: 0,
            inputs: Vec::new(),
            checks: Vec::new(),
            elapsed_ms: 0,
            started: Some(Instant::now()),
        }
    }

    /// Reads a file, records its digest and returns the text.
    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn pass(&mut self, name: impl Into<String>, detail: impl Into<String>) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            pass: true,
            detail: Some(detail.into()),
            witness: None,
        });
    }

    pub fn fail(&mut self, name: impl Into<String>, detail: impl Into<String>, witness: Value) {
        self.checks.push(CheckOutcome {
            name: name.into(),
            pass: false,
            detail: Some(detail.into()),
            witness: Some(witness),
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn finish(&mut self) {
        if let Some(t) = self.started {
            self.elapsed_ms = t.elapsed().as_millis();
        }
    }
}
