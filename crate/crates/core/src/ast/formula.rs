use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::expr::{Expr, Value};
use super::ident::{fresh_ident, Ident, Name, NameSort};
use super::label::ActionLabel;

/// What an existential ranges over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantSort {
    Participant,
    /// shared channels (`schan`)
    Shared,
    /// session channels (`kchan`)
    Session,
    Label,
    /// expression placeholders, instantiated with values
    Expr,
}

impl QuantSort {
    pub fn keyword(self) -> &'static str {
        match self {
            QuantSort::Participant => "participant",
            QuantSort::Shared => "schan",
            QuantSort::Session => "kchan",
            QuantSort::Label => "label",
            QuantSort::Expr => "expr",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Some(match s {
            "participant" => QuantSort::Participant,
            "schan" => QuantSort::Shared,
            "kchan" => QuantSort::Session,
            "label" => QuantSort::Label,
            "expr" => QuantSort::Expr,
            _ => return None,
        })
    }

    /// The namespace of the occurrences this quantifier binds.
    pub fn name_sort(self) -> NameSort {
        match self {
            QuantSort::Participant => NameSort::Participant,
            QuantSort::Shared => NameSort::SharedChannel,
            QuantSort::Session => NameSort::SessionChannel,
            QuantSort::Label => NameSort::BranchLabel,
            QuantSort::Expr => NameSort::Variable,
        }
    }
}

impl fmt::Display for QuantSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Binder {
    pub var: Ident,
    pub sort: QuantSort,
}

impl Binder {
    pub fn new(var: &str, sort: QuantSort) -> Self {
        Binder { var: var.into(), sort }
    }
}

/// What a quantified variable gets instantiated with.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(untagged)]
pub enum Witness {
    Name(Ident),
    Value(Value),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Name(n) => write!(f, "{n}"),
            Witness::Value(v) => write!(f, "{v}"),
        }
    }
}

/// `e@A`: an expression evaluated in the store of `at`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Located {
    pub expr: Expr,
    pub at: Ident,
}

impl Located {
    pub fn new(expr: Expr, at: &str) -> Self {
        Located { expr, at: at.into() }
    }

    /// `x@A`
    pub fn var(x: &str, at: &str) -> Self {
        Located::new(Expr::var(x), at)
    }

    fn collect_names(&self, out: &mut BTreeSet<Name>) {
        Expr::At(Box::new(self.expr.clone()), self.at.clone()).collect_names(out);
    }
}

/// Global-logic formulae. The first eight variants are the core logic;
/// the rest is notation removed by `checker::expand_derived`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Exists(Binder, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Neg(Box<Formula>),
    Action(ActionLabel, Box<Formula>),
    End,
    Eq(Located, Located),
    /// Spatial composition `φ | χ`.
    Par(Box<Formula>, Box<Formula>),
    /// `◇φ`
    May(Box<Formula>),

    True,
    False,
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(Binder, Box<Formula>),
    /// `□φ`
    Always(Box<Formula>),
    /// `[ℓ]φ`
    Must(ActionLabel, Box<Formula>),
    /// `◦φ`
    Next(Box<Formula>),
    /// `∃ℓ.⟨ℓ⟩φ`, written `<_> φ`
    ExistsLabel(Box<Formula>),
    /// `Interact(A, B) φ`
    Interact(Ident, Ident, Box<Formula>),
}

use Formula as F;

impl Formula {
    pub fn exists(var: &str, sort: QuantSort, body: Formula) -> Self {
        F::Exists(Binder::new(var, sort), Box::new(body))
    }

    pub fn forall(var: &str, sort: QuantSort, body: Formula) -> Self {
        F::Forall(Binder::new(var, sort), Box::new(body))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        F::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        F::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        F::Implies(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Formula) -> Self {
        F::Neg(Box::new(a))
    }

    pub fn action(l: ActionLabel, a: Formula) -> Self {
        F::Action(l, Box::new(a))
    }

    pub fn par(a: Formula, b: Formula) -> Self {
        F::Par(Box::new(a), Box::new(b))
    }

    pub fn may(a: Formula) -> Self {
        F::May(Box::new(a))
    }

    pub fn always(a: Formula) -> Self {
        F::Always(Box::new(a))
    }

    pub fn eq(l: Located, r: Located) -> Self {
        F::Eq(l, r)
    }

    /// True iff only the eight core constructors occur.
    pub fn is_core(&self) -> bool {
        match self {
            F::End | F::Eq(..) => true,
            F::Exists(_, a) | F::Neg(a) | F::Action(_, a) | F::May(a) => a.is_core(),
            F::And(a, b) | F::Par(a, b) => a.is_core() && b.is_core(),
            _ => false,
        }
    }

    /// Nesting depth of connectives (atoms have depth 1).
    pub fn depth(&self) -> usize {
        match self {
            F::End | F::Eq(..) | F::True | F::False => 1,
            F::Exists(_, a)
            | F::Forall(_, a)
            | F::Neg(a)
            | F::Action(_, a)
            | F::Must(_, a)
            | F::May(a)
            | F::Always(a)
            | F::Next(a)
            | F::ExistsLabel(a)
            | F::Interact(_, _, a) => 1 + a.depth(),
            F::And(a, b) | F::Par(a, b) | F::Or(a, b) | F::Implies(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// Free names of a core formula. `Exists` binds its variable; action
    /// labels contribute all their components. Sugar nodes are handled
    /// syntactically (binders they introduce on expansion are fresh).
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        match self {
            F::End | F::True | F::False => {}
            F::Eq(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            F::Exists(b, a) | F::Forall(b, a) => {
                let mut inner = BTreeSet::new();
                a.collect_free(&mut inner);
                inner.remove(&Name::new(b.sort.name_sort(), b.var.clone()));
                out.extend(inner);
            }
            F::Action(l, a) | F::Must(l, a) => {
                l.collect_names(out);
                a.collect_free(out);
            }
            F::Interact(p, q, a) => {
                out.insert(Name::new(NameSort::Participant, p.clone()));
                out.insert(Name::new(NameSort::Participant, q.clone()));
                a.collect_free(out);
            }
            F::Neg(a) | F::May(a) | F::Always(a) | F::Next(a) | F::ExistsLabel(a) => a.collect_free(out),
            F::And(a, b) | F::Par(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
        }
    }

    /// Identifiers used anywhere (free or bound) in the given sort.
    pub fn all_idents(&self, sort: NameSort, out: &mut BTreeSet<Ident>) {
        let mut names = BTreeSet::new();
        self.collect_all(&mut names);
        out.extend(names.into_iter().filter(|n| n.sort == sort).map(|n| n.ident));
    }

    fn collect_all(&self, out: &mut BTreeSet<Name>) {
        match self {
            F::Exists(b, a) | F::Forall(b, a) => {
                out.insert(Name::new(b.sort.name_sort(), b.var.clone()));
                a.collect_all(out);
            }
            F::Action(l, a) | F::Must(l, a) => {
                l.collect_names(out);
                a.collect_all(out);
            }
            F::Neg(a) | F::May(a) | F::Always(a) | F::Next(a) | F::ExistsLabel(a) => a.collect_all(out),
            F::Interact(..) => self.collect_free(out),
            F::And(a, b) | F::Par(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                a.collect_all(out);
                b.collect_all(out);
            }
            F::End | F::True | F::False | F::Eq(..) => self.collect_free(out),
        }
    }

    /// Literal values appearing in equalities.
    pub fn literals(&self, out: &mut BTreeSet<Value>) {
        match self {
            F::Eq(l, r) => {
                l.expr.collect_literals(out);
                r.expr.collect_literals(out);
            }
            F::End | F::True | F::False => {}
            F::Exists(_, a)
            | F::Forall(_, a)
            | F::Neg(a)
            | F::Action(_, a)
            | F::Must(_, a)
            | F::May(a)
            | F::Always(a)
            | F::Next(a)
            | F::ExistsLabel(a)
            | F::Interact(_, _, a) => a.literals(out),
            F::And(a, b) | F::Par(a, b) | F::Or(a, b) | F::Implies(a, b) => {
                a.literals(out);
                b.literals(out);
            }
        }
    }

    /// Capture-avoiding `φ[w/x]` where `x` has sort `sort`.
    pub fn subst(&self, sort: QuantSort, x: &Ident, w: &Witness) -> Formula {
        let s = |a: &Formula| Box::new(a.subst(sort, x, w));
        match self {
            F::End | F::True | F::False => self.clone(),
            F::Eq(l, r) => F::Eq(subst_located(l, sort, x, w), subst_located(r, sort, x, w)),
            F::Action(l, a) => F::Action(subst_label(l, sort, x, w), s(a)),
            F::Must(l, a) => F::Must(subst_label(l, sort, x, w), s(a)),
            F::Interact(p, q, a) => {
                let rp = |id: &Ident| match (sort, w) {
                    (QuantSort::Participant, Witness::Name(n)) if id == x => n.clone(),
                    _ => id.clone(),
                };
                F::Interact(rp(p), rp(q), s(a))
            }
            F::Exists(b, a) | F::Forall(b, a) => {
                let rebuild = |b: Binder, a: Formula| match self {
                    F::Exists(..) => F::Exists(b, Box::new(a)),
                    _ => F::Forall(b, Box::new(a)),
                };
                if b.sort == sort && b.var == *x {
                    return self.clone();
                }
                let x_free = a
                    .free_names()
                    .contains(&Name::new(sort.name_sort(), x.clone()));
                if !x_free {
                    return self.clone();
                }
                let captures = matches!(w, Witness::Name(n) if *n == b.var && b.sort == sort);
                if captures {
                    let mut used = BTreeSet::new();
                    a.all_idents(b.sort.name_sort(), &mut used);
                    used.insert(x.clone());
                    if let Witness::Name(n) = w {
                        used.insert(n.clone());
                    }
                    let fresh = fresh_ident(b.var.base(), |c| used.iter().any(|u| u.as_str() == c));
                    let renamed = a.rename_bound(b.sort, &b.var, &fresh);
                    rebuild(Binder { var: fresh, sort: b.sort }, renamed.subst(sort, x, w))
                } else {
                    rebuild(b.clone(), a.subst(sort, x, w))
                }
            }
            F::Neg(a) => F::Neg(s(a)),
            F::May(a) => F::May(s(a)),
            F::Always(a) => F::Always(s(a)),
            F::Next(a) => F::Next(s(a)),
            F::ExistsLabel(a) => F::ExistsLabel(s(a)),
            F::And(a, b) => F::And(s(a), s(b)),
            F::Par(a, b) => F::Par(s(a), s(b)),
            F::Or(a, b) => F::Or(s(a), s(b)),
            F::Implies(a, b) => F::Implies(s(a), s(b)),
        }
    }

    /// Rename free occurrences of a bound variable to a fresh identifier.
    fn rename_bound(&self, sort: QuantSort, old: &Ident, new: &Ident) -> Formula {
        let w = match sort {
            QuantSort::Expr => {
                // Expression placeholders are renamed as variables, not values.
                return self.rename_expr_var(old, new);
            }
            _ => Witness::Name(new.clone()),
        };
        self.subst(sort, old, &w)
    }

    fn rename_expr_var(&self, old: &Ident, new: &Ident) -> Formula {
        let r = |a: &Formula| Box::new(a.rename_expr_var(old, new));
        match self {
            F::Eq(l, rr) => F::Eq(
                Located { expr: l.expr.rename_var(old, new), at: l.at.clone() },
                Located { expr: rr.expr.rename_var(old, new), at: rr.at.clone() },
            ),
            F::Exists(b, _) | F::Forall(b, _) if b.sort == QuantSort::Expr && b.var == *old => self.clone(),
            F::Exists(b, a) => F::Exists(b.clone(), r(a)),
            F::Forall(b, a) => F::Forall(b.clone(), r(a)),
            F::End | F::True | F::False => self.clone(),
            F::Action(l, a) => F::Action(l.clone(), r(a)),
            F::Must(l, a) => F::Must(l.clone(), r(a)),
            F::Interact(p, q, a) => F::Interact(p.clone(), q.clone(), r(a)),
            F::Neg(a) => F::Neg(r(a)),
            F::May(a) => F::May(r(a)),
            F::Always(a) => F::Always(r(a)),
            F::Next(a) => F::Next(r(a)),
            F::ExistsLabel(a) => F::ExistsLabel(r(a)),
            F::And(a, b) => F::And(r(a), r(b)),
            F::Par(a, b) => F::Par(r(a), r(b)),
            F::Or(a, b) => F::Or(r(a), r(b)),
            F::Implies(a, b) => F::Implies(r(a), r(b)),
        }
    }
}

fn subst_label(l: &ActionLabel, sort: QuantSort, x: &Ident, w: &Witness) -> ActionLabel {
    match (sort, w) {
        (QuantSort::Expr, _) | (_, Witness::Value(_)) => l.clone(),
        (s, Witness::Name(n)) => l.rename(s.name_sort(), x, n),
    }
}

fn subst_located(l: &Located, sort: QuantSort, x: &Ident, w: &Witness) -> Located {
    match (sort, w) {
        (QuantSort::Participant, Witness::Name(n)) => Located {
            expr: l.expr.rename_participant(x, n),
            at: if l.at == *x { n.clone() } else { l.at.clone() },
        },
        (QuantSort::Expr, Witness::Value(v)) => Located {
            expr: l.expr.replace_var(x, v),
            at: l.at.clone(),
        },
        (QuantSort::Expr, Witness::Name(n)) => Located {
            expr: l.expr.rename_var(x, n),
            at: l.at.clone(),
        },
        _ => l.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tt() -> Formula {
        F::True
    }

    #[test]
    fn free_names_examples() {
        assert!(F::End.free_names().is_empty());
        let f = F::exists(
            "B",
            QuantSort::Participant,
            F::action(ActionLabel::init("A", "B", "a", "k"), tt()),
        );
        assert_eq!(
            f.free_names(),
            BTreeSet::from([Name::participant("A"), Name::shared("a"), Name::session("k")])
        );
        let eq = F::eq(Located::var("x", "A"), Located::var("y", "B"));
        assert_eq!(
            eq.free_names(),
            BTreeSet::from([
                Name::variable("x"),
                Name::participant("A"),
                Name::variable("y"),
                Name::participant("B")
            ])
        );
    }

    #[test]
    fn subst_respects_shadowing_and_sorts() {
        let body = F::action(ActionLabel::com("X", "A", "X"), F::End);
        let f = F::exists("X", QuantSort::Participant, body.clone());
        let w = Witness::Name("B".into());
        assert_eq!(f.subst(QuantSort::Participant, &"X".into(), &w), f);
        // Session X untouched by a participant substitution.
        assert_eq!(
            body.subst(QuantSort::Participant, &"X".into(), &w),
            F::action(ActionLabel::com("B", "A", "X"), F::End)
        );
    }

    #[test]
    fn subst_avoids_capture() {
        // ∃B. <com A->B k> end, substitute A := B must not capture.
        let f = F::exists(
            "B",
            QuantSort::Participant,
            F::action(ActionLabel::com("A", "B", "k"), F::End),
        );
        let g = f.subst(QuantSort::Participant, &"A".into(), &Witness::Name("B".into()));
        let F::Exists(b, body) = &g else { panic!() };
        assert_ne!(b.var.as_str(), "B");
        assert_eq!(
            **body,
            F::action(ActionLabel::com("B", b.var.as_str(), "k"), F::End)
        );
    }

    #[test]
    fn expr_witness_replaces_reads() {
        let f = F::eq(Located::var("v", "A"), Located::var("x", "A"));
        let g = f.subst(QuantSort::Expr, &"v".into(), &Witness::Value(Value::Int(2)));
        assert_eq!(g, F::eq(Located::new(Expr::int(2), "A"), Located::var("x", "A")));
    }
}
