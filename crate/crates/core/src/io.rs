//! JSON documents read by the command-line tool.
//!
//! Every type that can be loaded validates itself during deserialization, so
//! a document either yields a value that satisfies its invariants or a
//! [`IoError::SchemaViolation`] pointing at the offending location.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Matrix3;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_path_to_error::Segment;
use thiserror::Error;

use crate::linalg::nested;
use crate::loops::{FramingLoop, PairLoop, PairSample};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IoError {
    #[error("cannot read {path}: {message}")]
    Read { path: String, message: String },
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema violation at {pointer}: {message}")]
    SchemaViolation { pointer: String, message: String },
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    let mut out = String::new();
    for seg in path.iter() {
        match seg {
            Segment::Seq { index } => write!(out, "/{index}").unwrap(),
            Segment::Map { key } => write!(out, "/{}", key.replace('~', "~0").replace('/', "~1")).unwrap(),
            Segment::Enum { variant } => write!(out, "/{variant}").unwrap(),
            Segment::Unknown => out.push_str("/?"),
        }
    }
    out
}

/// Parses and validates a document held in memory.
pub fn parse_document<T: DeserializeOwned>(text: &str) -> Result<T, IoError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let v = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let inner = e.inner();
        if inner.is_syntax() || inner.is_eof() {
            IoError::Syntax {
                line: inner.line(),
                column: inner.column(),
                message: inner.to_string(),
            }
        } else {
            let p = pointer(e.path());
            IoError::SchemaViolation {
                pointer: if p.is_empty() { "/".into() } else { p },
                message: strip_position(&inner.to_string()),
            }
        }
    })?;
    de.end().map_err(|e| IoError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    Ok(v)
}

fn strip_position(msg: &str) -> String {
    match msg.rfind(" at line ") {
        Some(i) => msg[..i].to_string(),
        None => msg.to_string(),
    }
}

pub fn load_document<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::Read {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_document(&text)
}

/// A single pair `{"V": frame, "Vp": frame}`.
pub type PairDocument = PairSample;

/// Input of the μ computation: two framing loops and, optionally, the
/// per-sample pairing matrices or the pair loop they come from. Lengths are
/// checked on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MuDoc", into = "MuDoc")]
pub struct MuDocument {
    pub plus: FramingLoop,
    pub minus: FramingLoop,
    pub iso: Option<Vec<Matrix3<f64>>>,
    pub pairs: Option<PairLoop>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MuDoc {
    plus: FramingLoop,
    minus: FramingLoop,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    iso: Option<Vec<nested::RealRows>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pairs: Option<PairLoop>,
}

impl TryFrom<MuDoc> for MuDocument {
    type Error = String;
    fn try_from(d: MuDoc) -> Result<Self, String> {
        let n = d.plus.len();
        let mut counts = vec![("minus", d.minus.len())];
        if let Some(iso) = &d.iso {
            counts.push(("iso", iso.len()));
        }
        if let Some(p) = &d.pairs {
            counts.push(("pairs", p.len()));
        }
        if d.iso.is_some() && d.pairs.is_some() {
            return Err("give at most one of iso and pairs".into());
        }
        for (name, c) in counts {
            if c != n {
                return Err(format!("mismatched sample counts: plus has {n}, {name} has {c}"));
            }
        }
        Ok(MuDocument {
            plus: d.plus,
            minus: d.minus,
            iso: d.iso.map(|v| v.into_iter().map(Into::into).collect()),
            pairs: d.pairs,
        })
    }
}

impl From<MuDocument> for MuDoc {
    fn from(d: MuDocument) -> Self {
        MuDoc {
            plus: d.plus,
            minus: d.minus,
            iso: d.iso.map(|v| v.into_iter().map(Into::into).collect()),
            pairs: d.pairs,
        }
    }
}
