use std::collections::BTreeSet;
use std::fmt::Write;

use super::document::{Declaration, Document};
use crate::ast::{ActionLabel, Choreography, Expr, Formula, Located, SessionType, State};

// ------------------------------------------------------------- expressions

const E_CMP: u8 = 0;
const E_ADD: u8 = 1;
const E_UNARY: u8 = 2;
const E_PRIMARY: u8 = 3;

pub fn print_expr(e: &Expr) -> String {
    let mut s = String::new();
    expr_at(&mut s, e, E_CMP);
    s
}

fn expr_at(out: &mut String, e: &Expr, ctx: u8) {
    let level = match e {
        Expr::Lit(_) | Expr::Var(_) => E_PRIMARY,
        Expr::At(..) | Expr::Not(_) => E_UNARY,
        Expr::Bin(op, ..) if op.is_comparison() => E_CMP,
        Expr::Bin(..) => E_ADD,
    };
    let paren = level < ctx;
    if paren {
        out.push('(');
    }
    match e {
        Expr::Lit(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Var(x) => out.push_str(x.as_str()),
        Expr::At(inner, p) => {
            expr_at(out, inner, E_PRIMARY);
            let _ = write!(out, "@{p}");
        }
        Expr::Not(inner) => {
            out.push('!');
            expr_at(out, inner, E_UNARY);
        }
        Expr::Bin(op, l, r) if op.is_comparison() => {
            expr_at(out, l, E_ADD);
            let _ = write!(out, " {} ", op.symbol());
            expr_at(out, r, E_ADD);
        }
        Expr::Bin(op, l, r) => {
            expr_at(out, l, E_ADD);
            let _ = write!(out, " {} ", op.symbol());
            expr_at(out, r, E_UNARY);
        }
    }
    if paren {
        out.push(')');
    }
}

fn located(out: &mut String, l: &Located) {
    expr_at(out, &l.expr, E_PRIMARY);
    let _ = write!(out, "@{}", l.at);
}

/// The guard of a conditional. The bare form is used only when the parser
/// would infer the same evaluation site from it.
fn guard(out: &mut String, g: &Expr, at: &crate::ast::Ident) {
    let mut locs = BTreeSet::new();
    g.location_participants(&mut locs);
    let inferable = !matches!(g, Expr::At(..))
        && !g.reads_locally()
        && locs.len() == 1
        && locs.contains(at);
    if inferable {
        expr_at(out, g, E_CMP);
    } else {
        expr_at(out, g, E_PRIMARY);
        let _ = write!(out, "@{at}");
    }
}

// ----------------------------------------------------------- choreographies

struct ChorPrinter {
    out: String,
    /// `None` prints everything on one line.
    indent: Option<usize>,
}

const C_PAR: u8 = 0;
const C_PREFIX: u8 = 1;

impl ChorPrinter {
    fn newline(&mut self) {
        match self.indent {
            Some(n) => {
                self.out.push('\n');
                for _ in 0..n {
                    self.out.push_str("  ");
                }
            }
            None => self.out.push(' '),
        }
    }

    fn nested(&mut self, f: impl FnOnce(&mut Self)) {
        if let Some(n) = self.indent.as_mut() {
            *n += 1;
        }
        f(self);
        if let Some(n) = self.indent.as_mut() {
            *n -= 1;
        }
    }

    fn chor(&mut self, c: &Choreography, ctx: u8) {
        match c {
            Choreography::Inaction => self.out.push('0'),
            Choreography::Par(l, r) => {
                if ctx > C_PAR {
                    self.out.push('(');
                }
                self.chor(l, C_PAR);
                self.out.push_str(" |");
                self.newline();
                self.chor(r, C_PREFIX);
                if ctx > C_PAR {
                    self.out.push(')');
                }
            }
            Choreography::Init {
                from,
                to,
                service,
                session,
                cont,
            } => {
                let _ = write!(self.out, "{from} -> {to} : {service}({session}).");
                self.newline();
                self.chor(cont, C_PREFIX);
            }
            Choreography::Com {
                from,
                to,
                session,
                expr,
                var,
                cont,
            } => {
                let _ = write!(self.out, "{from} -> {to} : {session}<");
                expr_at(&mut self.out, expr, E_CMP);
                let _ = write!(self.out, ", {var}>.");
                self.newline();
                self.chor(cont, C_PREFIX);
            }
            Choreography::Choice {
                from,
                to,
                session,
                branches,
            } => {
                let _ = write!(self.out, "{from} -> {to} : {session}[+]{{");
                self.nested(|p| {
                    for (i, (l, b)) in branches.iter().enumerate() {
                        if i > 0 {
                            p.out.push(',');
                        }
                        p.newline();
                        let _ = write!(p.out, "{l}: ");
                        p.chor(b, C_PAR);
                    }
                });
                self.newline();
                self.out.push('}');
            }
            Choreography::Cond { guard: g, at, then, els } => {
                self.out.push_str("if ");
                guard(&mut self.out, g, at);
                self.out.push_str(" then");
                self.nested(|p| {
                    p.newline();
                    p.chor(then, C_PAR);
                });
                self.newline();
                self.out.push_str("else");
                if matches!(**els, Choreography::Cond { .. }) {
                    self.out.push(' ');
                    self.chor(els, C_PREFIX);
                } else {
                    self.nested(|p| {
                        p.newline();
                        p.chor(els, C_PREFIX);
                    });
                }
            }
            Choreography::RecVar(x) => self.out.push_str(x.as_str()),
            Choreography::Rec { var, body } => {
                let _ = write!(self.out, "rec {var} {{");
                self.nested(|p| {
                    p.newline();
                    p.chor(body, C_PAR);
                });
                self.newline();
                self.out.push('}');
            }
        }
    }
}

/// One-line rendering; `parse_choreography` reads it back.
pub fn print_choreography(c: &Choreography) -> String {
    let mut p = ChorPrinter {
        out: String::new(),
        indent: None,
    };
    p.chor(c, C_PAR);
    p.out
}

/// Multi-line rendering with two-space indentation, used by `fmt`.
pub fn print_choreography_pretty(c: &Choreography, indent: usize) -> String {
    let mut p = ChorPrinter {
        out: String::new(),
        indent: Some(indent),
    };
    p.chor(c, C_PAR);
    p.out
}

// ------------------------------------------------------------------ formulae

const F_IMPLIES: u8 = 0;
const F_OR: u8 = 1;
const F_PAR: u8 = 2;
const F_AND: u8 = 3;
const F_UNARY: u8 = 4;

pub fn print_label(l: &ActionLabel) -> String {
    match l {
        ActionLabel::Init {
            from,
            to,
            service,
            session,
        } => format!("init {from}->{to} {service}({session})"),
        ActionLabel::Com { from, to, session } => format!("com {from}->{to} {session}"),
        ActionLabel::Branch {
            from,
            to,
            session,
            label,
        } => format!("branch {from}->{to} {session} [{label}]"),
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    formula_at(&mut s, f, F_IMPLIES);
    s
}

fn formula_at(out: &mut String, f: &Formula, ctx: u8) {
    let level = match f {
        Formula::Implies(..) => F_IMPLIES,
        Formula::Or(..) => F_OR,
        Formula::Par(..) => F_PAR,
        Formula::And(..) => F_AND,
        // quantifiers extend as far right as possible
        Formula::Exists(..) | Formula::Forall(..) => F_IMPLIES,
        _ => F_UNARY,
    };
    let paren = level < ctx;
    if paren {
        out.push('(');
    }
    let binary = |out: &mut String, l: &Formula, op: &str, r: &Formula, lc: u8, rc: u8| {
        formula_at(out, l, lc);
        let _ = write!(out, " {op} ");
        formula_at(out, r, rc);
    };
    match f {
        Formula::Implies(a, b) => binary(out, a, "=>", b, F_OR, F_IMPLIES),
        Formula::Or(a, b) => binary(out, a, "\\/", b, F_OR, F_PAR),
        Formula::Par(a, b) => binary(out, a, "|", b, F_PAR, F_AND),
        Formula::And(a, b) => binary(out, a, "&", b, F_AND, F_UNARY),
        Formula::Exists(b, body) | Formula::Forall(b, body) => {
            let kw = if matches!(f, Formula::Exists(..)) { "exists" } else { "forall" };
            let _ = write!(out, "{kw} {}:{} . ", b.var, b.sort);
            formula_at(out, body, F_IMPLIES);
        }
        Formula::Neg(a) => {
            out.push('~');
            formula_at(out, a, F_UNARY);
        }
        Formula::Action(l, a) => {
            let _ = write!(out, "<{}> ", print_label(l));
            formula_at(out, a, F_UNARY);
        }
        Formula::Must(l, a) => {
            let _ = write!(out, "[{}] ", print_label(l));
            formula_at(out, a, F_UNARY);
        }
        Formula::ExistsLabel(a) => {
            out.push_str("<_> ");
            formula_at(out, a, F_UNARY);
        }
        Formula::Interact(p, q, a) => {
            let _ = write!(out, "interact({p}, {q}) ");
            formula_at(out, a, F_UNARY);
        }
        Formula::May(a) | Formula::Always(a) | Formula::Next(a) => {
            out.push_str(match f {
                Formula::May(_) => "may ",
                Formula::Always(_) => "box ",
                _ => "next ",
            });
            formula_at(out, a, F_UNARY);
        }
        Formula::End => out.push_str("end"),
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Eq(l, r) => {
            located(out, l);
            out.push_str(" = ");
            located(out, r);
        }
    }
    if paren {
        out.push(')');
    }
}

// ---------------------------------------------------------- other artefacts

pub fn print_session_type(t: &SessionType) -> String {
    t.to_string()
}

pub fn print_state(s: &State) -> String {
    s.to_string()
}

/// Canonical layout of a document: one declaration per block, choreographies
/// pretty-printed.
pub fn print_document(d: &Document) -> String {
    let mut out = String::new();
    for (i, decl) in d.declarations.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        match decl {
            Declaration::State(s) => {
                if s.is_empty() {
                    out.push_str("state { }\n");
                } else {
                    out.push_str("state {\n");
                    let n = s.len();
                    for (j, (x, p, v)) in s.iter().enumerate() {
                        let _ = writeln!(out, "  {x}@{p} = {v}{}", if j + 1 < n { "," } else { "" });
                    }
                    out.push_str("}\n");
                }
            }
            Declaration::Chor(name, c) => {
                let _ = writeln!(out, "chor {name} =\n  {};", print_choreography_pretty(c, 1));
            }
            Declaration::Formula(name, f) => {
                let _ = writeln!(out, "formula {name} =\n  {};", print_formula(f));
            }
            Declaration::Type(name, t) => {
                let _ = writeln!(out, "type {name} = {t};");
            }
        }
    }
    out
}
