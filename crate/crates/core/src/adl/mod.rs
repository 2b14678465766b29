//! Textual architecture description language, context traces and the
//! family XML export.
//!
//! The ADL is layout-insensitive. `#` starts a comment that runs to the end
//! of the line, keywords are reserved, and numbers are plain decimals with an
//! optional fraction. Parsing stops at the first syntax error; reference
//! resolution is left to the well-formedness catalog.

mod lexer;
mod parser;
mod serialize;
mod trace;
mod xml;

use std::fmt;

use thiserror::Error;

pub use lexer::{is_identifier, is_keyword, KEYWORDS};
pub use parser::parse_model;
pub use serialize::serialize_model;
pub use trace::{
    apply_event, parse_context, parse_trace, serialize_trace, EventKind, EventValue, Trace, TraceEvent,
};
pub use xml::export_families_xml;

/// Position of a token in the source, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(line: usize, column: usize, length: usize) -> Self {
        Self {
            line,
            column,
            length,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: expected {expected}, found {found}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub fn new(span: SourceSpan, expected: impl Into<String>, found: impl Into<String>) -> Self {
        Self {
            span,
            expected: expected.into(),
            found: found.into(),
        }
    }
}
