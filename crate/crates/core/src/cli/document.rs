//! The JSON join document.
//!
//! ```json
//! {
//!   "blocks": [
//!     [0, 1, 0],
//!     [0, 1, 1, 1, 1]
//!   ],
//!   "couplings": [
//!     [0, 1],
//!     [1, 0]
//!   ],
//!   "labels": ["G", "H"]
//! }
//! ```
//!
//! Numbers are either bare reals or `[re, im]` pairs. `couplings` may be
//! omitted for a single block; its diagonal is ignored and written back as 0.

use std::fmt::{self, Write as _};

use serde::Deserialize;

use crate::circulant::CirculantMatrix;
use crate::dense::C64;
use crate::join::JoinSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentError {
    pub message: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
}

impl DocumentError {
    fn semantic(message: impl Into<String>) -> Self {
        Self { message: message.into(), line: None, column: None }
    }
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "parse error at line {l}, column {c}: {}", self.message),
            _ => write!(f, "parse error: {}", self.message),
        }
    }
}

impl std::error::Error for DocumentError {}

#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Real(f64),
    Pair([f64; 2]),
}

impl From<&Number> for C64 {
    fn from(n: &Number) -> C64 {
        match *n {
            Number::Real(x) => C64::new(x, 0.0),
            Number::Pair([re, im]) => C64::new(re, im),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    blocks: Vec<Vec<Number>>,
    #[serde(default)]
    couplings: Option<Vec<Vec<Number>>>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JoinDocument {
    pub spec: JoinSpec,
    pub labels: Option<Vec<String>>,
}

impl JoinDocument {
    pub fn new(spec: JoinSpec) -> Self {
        Self { spec, labels: None }
    }

    pub fn parse(text: &str) -> Result<Self, DocumentError> {
        let raw: RawDocument = serde_json::from_str(text).map_err(|e| DocumentError {
            message: e.to_string(),
            line: Some(e.line()),
            column: Some(e.column()),
        })?;
        let d = raw.blocks.len();
        if d == 0 {
            return Err(DocumentError::semantic("\"blocks\" must contain at least one block"));
        }
        let mut blocks = Vec::with_capacity(d);
        for (i, b) in raw.blocks.iter().enumerate() {
            if b.is_empty() {
                return Err(DocumentError::semantic(format!("blocks[{i}] is empty")));
            }
            let coeffs: Vec<C64> = b.iter().map(C64::from).collect();
            blocks
                .push(CirculantMatrix::new(coeffs).map_err(|e| DocumentError::semantic(format!("blocks[{i}]: {e}")))?);
        }
        let table: Vec<Vec<C64>> = match raw.couplings {
            Some(rows) => {
                if rows.len() != d {
                    return Err(DocumentError::semantic(format!(
                        "\"couplings\" has {} rows, expected {d}",
                        rows.len()
                    )));
                }
                for (i, r) in rows.iter().enumerate() {
                    if r.len() != d {
                        return Err(DocumentError::semantic(format!(
                            "couplings[{i}] has {} entries, expected {d} (ragged coupling table)",
                            r.len()
                        )));
                    }
                }
                rows.iter().map(|r| r.iter().map(C64::from).collect()).collect()
            }
            None if d == 1 => vec![vec![C64::new(0.0, 0.0)]],
            None => return Err(DocumentError::semantic("\"couplings\" is required when there is more than one block")),
        };
        if let Some(labels) = &raw.labels {
            if labels.len() != d {
                return Err(DocumentError::semantic(format!("\"labels\" has {} entries, expected {d}", labels.len())));
            }
        }
        let spec = JoinSpec::from_table(blocks, &table).map_err(|e| DocumentError::semantic(e.to_string()))?;
        Ok(Self { spec, labels: raw.labels })
    }

    /// Canonical text form; parsing it back and emitting again is
    /// byte-identical.
    pub fn emit(&self) -> String {
        let d = self.spec.d();
        let mut out = String::from("{\n  \"blocks\": [\n");
        for (i, b) in self.spec.blocks().iter().enumerate() {
            out.push_str("    ");
            write_row(&mut out, b.defining_vector());
            out.push_str(if i + 1 < d { ",\n" } else { "\n" });
        }
        out.push_str("  ],\n  \"couplings\": [\n");
        for i in 0..d {
            let row: Vec<C64> = (0..d).map(|j| self.spec.coupling(i, j)).collect();
            out.push_str("    ");
            write_row(&mut out, &row);
            out.push_str(if i + 1 < d { ",\n" } else { "\n" });
        }
        out.push_str("  ]");
        if let Some(labels) = &self.labels {
            out.push_str(",\n  \"labels\": [");
            for (i, l) in labels.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&serde_json::to_string(l).expect("strings serialize"));
            }
            out.push(']');
        }
        out.push_str("\n}\n");
        out
    }
}

fn write_row(out: &mut String, row: &[C64]) {
    out.push('[');
    for (j, x) in row.iter().enumerate() {
        if j > 0 {
            out.push_str(", ");
        }
        if x.im == 0.0 {
            write!(out, "{}", x.re).expect("write to string");
        } else {
            write!(out, "[{}, {}]", x.re, x.im).expect("write to string");
        }
    }
    out.push(']');
}
