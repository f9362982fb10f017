use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use slaglab::io::{parse_document, IoError};

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    /// Unreadable or invalid input; exit code 2.
    Malformed(String),
    /// A typed error from the library; exit code 1.
    Computation { kind: String, message: String },
    /// The command ran but reported failing checks; exit code 1.
    ChecksFailed,
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Malformed(_) => 2,
            _ => 1,
        }
    }

    /// Wraps a library error, tagging it with its variant name.
    pub fn computation<E: std::fmt::Debug + std::fmt::Display>(e: E) -> Self {
        let dbg = format!("{e:?}");
        let mut kind: String = dbg.chars().take_while(|c| c.is_alphanumeric()).collect();
        // Wrapped errors report the innermost variant.
        let mut rest = &dbg[kind.len()..];
        while rest.starts_with('(') && kind.chars().all(|c| c.is_alphanumeric()) {
            let inner: String = rest[1..].chars().take_while(|c| c.is_alphanumeric()).collect();
            if inner.is_empty() || !inner.chars().next().unwrap().is_uppercase() {
                break;
            }
            rest = &rest[1 + inner.len()..];
            kind = inner;
        }
        Failure::Computation {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Malformed(e.to_string())
    }
}

#[derive(Debug, Serialize)]
struct ErrorDoc<'a> {
    kind: &'a str,
    message: &'a str,
}

#[derive(Debug, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
}

/// Output of one invocation. Field order and contents are fixed for fixed
/// inputs, so two runs with the same arguments print identical bytes.
#[derive(Debug, Default)]
pub struct Report {
    pub subcommand: &'static str,
    pub config: Value,
    pub inputs: BTreeMap<String, String>,
    pub results: Value,
    pub checks: Vec<CheckLine>,
}

#[derive(Serialize)]
struct ReportDoc<'a> {
    subcommand: &'a str,
    config: &'a Value,
    inputs_digest: &'a BTreeMap<String, String>,
    results: &'a Value,
    checks: &'a [CheckLine],
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorDoc<'a>>,
}

impl Report {
    pub fn new(subcommand: &'static str, config: Value) -> Self {
        Report {
            subcommand,
            config,
            results: Value::Null,
            ..Default::default()
        }
    }

    /// Reads, digests and parses an input document.
    pub fn load<T: serde::de::DeserializeOwned>(&mut self, path: &Path) -> Result<T, Failure> {
        let bytes = std::fs::read(path).map_err(|e| IoError::Read {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.inputs
            .insert(path.display().to_string(), format!("sha256:{:x}", Sha256::digest(&bytes)));
        let text = String::from_utf8(bytes).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
        Ok(parse_document(&text)?)
    }

    pub fn check(&mut self, name: &str, passed: bool) {
        self.checks.push(CheckLine {
            name: name.into(),
            passed,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self, failure: Option<&Failure>) -> String {
        let error = failure.map(|f| match f {
            Failure::Malformed(m) => ErrorDoc {
                kind: "MalformedInput",
                message: m,
            },
            Failure::Computation { kind, message } => ErrorDoc { kind, message },
            Failure::ChecksFailed => ErrorDoc {
                kind: "ChecksFailed",
                message: "one or more checks failed",
            },
        });
        let doc = ReportDoc {
            subcommand: self.subcommand,
            config: &self.config,
            inputs_digest: &self.inputs,
            results: &self.results,
            checks: &self.checks,
            passed: failure.is_none() && self.passed(),
            error,
        };
        serde_json::to_string_pretty(&doc).expect("report serializes")
    }
}
