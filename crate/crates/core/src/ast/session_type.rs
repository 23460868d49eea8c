use std::collections::BTreeSet;
use std::fmt;

use super::ident::Ident;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueType {
    Bool,
    Str,
    Int,
}

impl ValueType {
    pub fn keyword(self) -> &'static str {
        match self {
            ValueType::Bool => "bool",
            ValueType::Str => "string",
            ValueType::Int => "int",
        }
    }
}

/// Session types, syntax only: `!(θ).α`, `?(θ).α`, `&{l: α}`, `+{l: α}`,
/// `end`, `rec t . α`, `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SessionType {
    Send(ValueType, Box<SessionType>),
    Recv(ValueType, Box<SessionType>),
    Branch(Vec<(Ident, SessionType)>),
    Select(Vec<(Ident, SessionType)>),
    End,
    Rec(Ident, Box<SessionType>),
    Var(Ident),
}

impl SessionType {
    /// True iff every type variable is bound by an enclosing `rec`.
    pub fn is_closed(&self) -> bool {
        fn go(t: &SessionType, bound: &mut Vec<Ident>) -> bool {
            match t {
                SessionType::End => true,
                SessionType::Var(v) => bound.contains(v),
                SessionType::Send(_, k) | SessionType::Recv(_, k) => go(k, bound),
                SessionType::Branch(bs) | SessionType::Select(bs) => bs.iter().all(|(_, t)| go(t, bound)),
                SessionType::Rec(v, body) => {
                    bound.push(v.clone());
                    let ok = go(body, bound);
                    bound.pop();
                    ok
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn has_duplicate_labels(&self) -> bool {
        match self {
            SessionType::End | SessionType::Var(_) => false,
            SessionType::Send(_, k) | SessionType::Recv(_, k) | SessionType::Rec(_, k) => k.has_duplicate_labels(),
            SessionType::Branch(bs) | SessionType::Select(bs) => {
                let mut seen = BTreeSet::new();
                bs.iter().any(|(l, t)| !seen.insert(l) || t.has_duplicate_labels())
            }
        }
    }
}

impl fmt::Display for SessionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let branches = |f: &mut fmt::Formatter<'_>, sym: &str, bs: &[(Ident, SessionType)]| {
            write!(f, "{sym}{{")?;
            for (i, (l, t)) in bs.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{l}: {t}")?;
            }
            f.write_str("}")
        };
        match self {
            SessionType::Send(v, k) => write!(f, "!({}). {k}", v.keyword()),
            SessionType::Recv(v, k) => write!(f, "?({}). {k}", v.keyword()),
            SessionType::Branch(bs) => branches(f, "&", bs),
            SessionType::Select(bs) => branches(f, "+", bs),
            SessionType::End => f.write_str("end"),
            SessionType::Rec(v, body) => write!(f, "rec {v} . {body}"),
            SessionType::Var(v) => write!(f, "{v}"),
        }
    }
}
