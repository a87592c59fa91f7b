use std::fmt;

use potd::PotdError;

/// A failure mapped to an exit status and a one-line report.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: kind.to_string(),
            message: message.into(),
        }
    }

    pub fn internal(kind: &str, message: impl Into<String>) -> Self {
        CliError {
            code: 1,
            kind: kind.to_string(),
            message: message.into(),
        }
    }
}

impl From<PotdError> for CliError {
    fn from(e: PotdError) -> Self {
        CliError {
            code: if e.is_usage() { 2 } else { 1 },
            kind: e.kind().to_string(),
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::internal("io", e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::internal("json", e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // single line: newlines in nested messages are flattened
        write!(f, "error kind={} message={}", self.kind, self.message.replace('\n', " "))
    }
}
