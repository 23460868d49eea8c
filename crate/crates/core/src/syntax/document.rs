use std::collections::BTreeMap;
use std::path::Path;

use super::parser::Parser;
use super::{ParseError, SourceSpan};
use crate::ast::{Choreography, Formula, Ident, SessionType, State};

/// One top-level item of a `.gc` / `.gl` file.
#[derive(Debug, Clone, PartialEq)]
pub enum Declaration {
    Chor(Ident, Choreography),
    Formula(Ident, Formula),
    State(State),
    Type(Ident, SessionType),
}

/// A parsed source file, declarations kept in source order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Document {
    pub declarations: Vec<Declaration>,
}

impl Document {
    pub fn choreographies(&self) -> impl Iterator<Item = (&Ident, &Choreography)> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Chor(n, c) => Some((n, c)),
            _ => None,
        })
    }

    pub fn formulas(&self) -> impl Iterator<Item = (&Ident, &Formula)> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Formula(n, f) => Some((n, f)),
            _ => None,
        })
    }

    pub fn session_types(&self) -> impl Iterator<Item = (&Ident, &SessionType)> {
        self.declarations.iter().filter_map(|d| match d {
            Declaration::Type(n, t) => Some((n, t)),
            _ => None,
        })
    }

    pub fn choreography(&self, name: &str) -> Option<&Choreography> {
        self.choreographies().find(|(n, _)| n.as_str() == name).map(|(_, c)| c)
    }

    pub fn formula(&self, name: &str) -> Option<&Formula> {
        self.formulas().find(|(n, _)| n.as_str() == name).map(|(_, f)| f)
    }

    /// The initial state block, if the file has one.
    pub fn state(&self) -> Option<&State> {
        self.declarations.iter().find_map(|d| match d {
            Declaration::State(s) => Some(s),
            _ => None,
        })
    }
}

pub(super) fn parse(text: &str, file: Option<&Path>) -> Result<Document, ParseError> {
    let mut p = Parser::new(text, file)?;
    let mut doc = Document::default();
    let mut names: BTreeMap<Ident, SourceSpan> = BTreeMap::new();
    let mut state_seen = false;
    let mut declare = |name: &Ident, span: SourceSpan| -> Result<(), ParseError> {
        if let Some(prev) = names.get(name) {
            return Err(ParseError {
                message: format!(
                    "`{name}` is already declared at line {}, column {}",
                    prev.line, prev.column
                ),
                span,
            });
        }
        names.insert(name.clone(), span);
        Ok(())
    };
    while !p.at_eof() {
        let span = p.current_span();
        let kw = p.expect_decl_kw()?;
        let decl = match kw.as_str() {
            "state" => {
                if state_seen {
                    return Err(ParseError {
                        span,
                        message: "a document may contain at most one state block".into(),
                    });
                }
                state_seen = true;
                p.open_block()?;
                let s = p.state_bindings()?;
                p.close_block()?;
                Declaration::State(s)
            }
            other => {
                let (name, span) = p.decl_name()?;
                declare(&name, span)?;
                let d = match other {
                    "chor" => Declaration::Chor(name, p.choreography()?),
                    "formula" => Declaration::Formula(name, p.formula()?),
                    _ => Declaration::Type(name, p.session_type()?),
                };
                p.end_decl()?;
                d
            }
        };
        doc.declarations.push(decl);
    }
    Ok(doc)
}
