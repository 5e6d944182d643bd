//! Input formats, CLI plumbing, and the benchmark harness.
//!
//! Two formats are supported: an SMT-LIB 2 subset (`.smt2`) and a native
//! s-expression mirror of the formula constructors (`.vs`), e.g.
//! `ExQ (Atom (Eq (Var 0)))`. Parsed problems are closed: SMT-LIB free
//! constants are existentially quantified in declaration order,
//! outermost-first.

pub mod bench;
pub mod native;
pub mod smtlib;

use crate::formula::Formula;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceFormat {
    Smtlib,
    Native,
}

/// A parsed decision problem: a closed formula, optionally with the
/// expected answer from the input's metadata.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub formula: Formula,
    pub expected: Option<bool>,
    pub source_format: SourceFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Sat,
    Unsat,
    Unknown,
}

impl Answer {
    pub fn from_decided(decided: Option<bool>) -> Answer {
        match decided {
            Some(true) => Answer::Sat,
            Some(false) => Answer::Unsat,
            None => Answer::Unknown,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Answer::Sat => "sat",
            Answer::Unsat => "unsat",
            Answer::Unknown => "unknown",
        }
    }
}

impl std::fmt::Display for Answer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One benchmark row; `residual_nodes` is populated only for `unknown`.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub name: String,
    pub algorithm: String,
    pub answer: Answer,
    pub ms: u128,
    pub residual_nodes: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, message: impl Into<String>) -> ParseError {
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn error(self, message: impl Into<String>) -> ParseError {
        ParseError::new(self.line, self.col, message)
    }
}

/// Chooses the input format from a file extension: `.smt2` is SMT-LIB,
/// anything else the native format.
pub fn format_for_path(path: &std::path::Path) -> SourceFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("smt2") => SourceFormat::Smtlib,
        _ => SourceFormat::Native,
    }
}

/// Parses `text` in the given format; `name` labels the resulting problem.
pub fn parse_problem(
    name: &str,
    text: &str,
    format: SourceFormat,
) -> Result<Problem, ParseError> {
    match format {
        SourceFormat::Smtlib => smtlib::parse_smtlib(name, text),
        SourceFormat::Native => native::parse_native(name, text),
    }
}
