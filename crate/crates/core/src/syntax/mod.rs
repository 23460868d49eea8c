//! Concrete syntax: an ASCII surface grammar for choreographies, formulae,
//! states, session types and whole documents, plus a printer whose output
//! parses back to an alpha-equivalent term.

mod document;
mod lexer;
mod parser;
mod printer;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::ast::{Choreography, Formula, SessionType, State};

pub use document::{Declaration, Document};
pub use printer::{
    print_choreography, print_choreography_pretty, print_document, print_expr, print_formula, print_label,
    print_session_type, print_state,
};

/// A position in a source text. Lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SourceSpan {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(p) => write!(f, "{}:{}:{}", p.display(), self.line, self.column),
            None => write!(f, "{}:{}", self.line, self.column),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
}

/// Parses a closed choreography: every process variable must be bound by an
/// enclosing `rec`.
pub fn parse_choreography(text: &str) -> Result<Choreography, ParseError> {
    parse_with(text, None, |p| p.choreography())
}

/// Like [`parse_choreography`] but accepts free process variables.
pub fn parse_choreography_open(text: &str) -> Result<Choreography, ParseError> {
    let mut p = parser::Parser::new(text, None)?;
    p.closed = false;
    let c = p.choreography()?;
    p.expect_eof()?;
    Ok(c)
}

pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_with(text, None, |p| p.formula())
}

/// Parses `x@A = v, ...`; the empty string is the empty state.
pub fn parse_state(text: &str) -> Result<State, ParseError> {
    parse_with(text, None, |p| p.state_bindings())
}

pub fn parse_session_type(text: &str) -> Result<SessionType, ParseError> {
    parse_with(text, None, |p| p.session_type())
}

pub fn parse_expr(text: &str) -> Result<crate::ast::Expr, ParseError> {
    parse_with(text, None, |p| p.expr())
}

/// Parses a `.gc`/`.gl` document. `file` only decorates error positions.
pub fn parse_document(text: &str, file: Option<&Path>) -> Result<Document, ParseError> {
    document::parse(text, file)
}

fn parse_with<T>(
    text: &str,
    file: Option<&Path>,
    f: impl FnOnce(&mut parser::Parser) -> Result<T, ParseError>,
) -> Result<T, ParseError> {
    let mut p = parser::Parser::new(text, file)?;
    let out = f(&mut p)?;
    p.expect_eof()?;
    Ok(out)
}
