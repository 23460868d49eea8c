use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::ident::{Ident, Name, NameSort};

/// A runtime value. The empty string plays the role of ε.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Str(String),
}

impl Value {
    pub fn str(s: impl Into<String>) -> Self {
        Value::Str(s.into())
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Bool(_) => "bool",
            Value::Str(_) => "string",
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) if s.is_empty() => f.write_str("eps"),
            Value::Str(s) => {
                f.write_str("\"")?;
                for c in s.chars() {
                    match c {
                        '"' => f.write_str("\\\"")?,
                        '\\' => f.write_str("\\\\")?,
                        '\n' => f.write_str("\\n")?,
                        c => write!(f, "{c}")?,
                    }
                }
                f.write_str("\"")
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum BinOp {
    Add,
    Sub,
    Lt,
    Eq,
    Ne,
    /// String concatenation, written `.`.
    Concat,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Lt => "<",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Concat => ".",
        }
    }

    pub(crate) fn is_comparison(self) -> bool {
        matches!(self, BinOp::Lt | BinOp::Eq | BinOp::Ne)
    }
}

/// First-order expressions. `Var` reads a variable at the participant the
/// expression is evaluated at; `At(e, P)` moves evaluation of `e` to `P`,
/// so `x@A` is `At(Var x, A)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Expr {
    Lit(Value),
    Var(Ident),
    At(Box<Expr>, Ident),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    pub fn int(i: i64) -> Self {
        Expr::Lit(Value::Int(i))
    }

    pub fn bool(b: bool) -> Self {
        Expr::Lit(Value::Bool(b))
    }

    pub fn str(s: &str) -> Self {
        Expr::Lit(Value::str(s))
    }

    pub fn var(x: &str) -> Self {
        Expr::Var(Ident::from(x))
    }

    /// `x@A`
    pub fn located(x: &str, at: &str) -> Self {
        Expr::At(Box::new(Expr::var(x)), Ident::from(at))
    }

    pub fn at(self, p: &str) -> Self {
        Expr::At(Box::new(self), Ident::from(p))
    }

    pub fn bin(op: BinOp, l: Expr, r: Expr) -> Self {
        Expr::Bin(op, Box::new(l), Box::new(r))
    }

    /// True iff the expression reads a variable at its evaluation site
    /// (i.e. outside any nested `At`).
    pub fn reads_locally(&self) -> bool {
        match self {
            Expr::Lit(_) | Expr::At(..) => false,
            Expr::Var(_) => true,
            Expr::Bin(_, l, r) => l.reads_locally() || r.reads_locally(),
            Expr::Not(e) => e.reads_locally(),
        }
    }

    /// Variables read and the participants they are read at. A location
    /// annotation on a read-free subexpression names nothing.
    pub fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(x) => {
                out.insert(Name::new(NameSort::Variable, x.clone()));
            }
            Expr::At(e, p) => {
                if e.reads_locally() {
                    out.insert(Name::new(NameSort::Participant, p.clone()));
                }
                e.collect_names(out);
            }
            Expr::Bin(_, l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Expr::Not(e) => e.collect_names(out),
        }
    }

    pub fn collect_literals(&self, out: &mut BTreeSet<Value>) {
        match self {
            Expr::Lit(v) => {
                out.insert(v.clone());
            }
            Expr::Var(_) => {}
            Expr::At(e, _) | Expr::Not(e) => e.collect_literals(out),
            Expr::Bin(_, l, r) => {
                l.collect_literals(out);
                r.collect_literals(out);
            }
        }
    }

    /// Rename participant `old` to `new` in every location annotation.
    pub fn rename_participant(&self, old: &Ident, new: &Ident) -> Expr {
        match self {
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::At(e, p) => {
                let p = if p == old { new.clone() } else { p.clone() };
                Expr::At(Box::new(e.rename_participant(old, new)), p)
            }
            Expr::Bin(op, l, r) => Expr::bin(
                *op,
                l.rename_participant(old, new),
                r.rename_participant(old, new),
            ),
            Expr::Not(e) => Expr::Not(Box::new(e.rename_participant(old, new))),
        }
    }

    /// Replace reads of variable `x` by a constant.
    pub fn replace_var(&self, x: &Ident, v: &Value) -> Expr {
        match self {
            Expr::Var(y) if y == x => Expr::Lit(v.clone()),
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::At(e, p) => Expr::At(Box::new(e.replace_var(x, v)), p.clone()),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.replace_var(x, v), r.replace_var(x, v)),
            Expr::Not(e) => Expr::Not(Box::new(e.replace_var(x, v))),
        }
    }

    /// Rename variable `old` to `new`.
    pub fn rename_var(&self, old: &Ident, new: &Ident) -> Expr {
        match self {
            Expr::Var(y) if y == old => Expr::Var(new.clone()),
            Expr::Lit(_) | Expr::Var(_) => self.clone(),
            Expr::At(e, p) => Expr::At(Box::new(e.rename_var(old, new)), p.clone()),
            Expr::Bin(op, l, r) => Expr::bin(*op, l.rename_var(old, new), r.rename_var(old, new)),
            Expr::Not(e) => Expr::Not(Box::new(e.rename_var(old, new))),
        }
    }

    /// Participants named by `At` annotations anywhere in the tree.
    pub(crate) fn location_participants(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Expr::Lit(_) | Expr::Var(_) => {}
            Expr::At(e, p) => {
                out.insert(p.clone());
                e.location_participants(out);
            }
            Expr::Bin(_, l, r) => {
                l.location_participants(out);
                r.location_participants(out);
            }
            Expr::Not(e) => e.location_participants(out),
        }
    }
}
