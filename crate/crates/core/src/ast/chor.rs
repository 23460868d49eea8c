use std::collections::BTreeSet;

use thiserror::Error;

use super::expr::{Expr, Value};
use super::ident::{fresh_ident, Ident, Name, NameSort};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AstError {
    #[error("duplicate branch label `{0}` in choice")]
    DuplicateLabel(Ident),
    #[error("choice must offer at least one branch")]
    EmptyChoice,
    #[error("unfold expects a recursion node")]
    NotRecursion,
}

/// Terms of the Global Calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Choreography {
    /// `0`
    Inaction,
    /// `A -> B : a(k). C` where `k` is bound in `C`.
    Init {
        from: Ident,
        to: Ident,
        service: Ident,
        session: Ident,
        cont: Box<Choreography>,
    },
    /// `A -> B : k<e, y>. C`; `e` is evaluated at `A`, `y` is written at `B`.
    /// `y` does not bind in `C`.
    Com {
        from: Ident,
        to: Ident,
        session: Ident,
        expr: Expr,
        var: Ident,
        cont: Box<Choreography>,
    },
    /// `A -> B : k[+]{ l1: C1, ... }`. Labels are pairwise distinct.
    Choice {
        from: Ident,
        to: Ident,
        session: Ident,
        branches: Vec<(Ident, Choreography)>,
    },
    Par(Box<Choreography>, Box<Choreography>),
    /// `if e@A then C1 else C2`
    Cond {
        guard: Expr,
        at: Ident,
        then: Box<Choreography>,
        els: Box<Choreography>,
    },
    RecVar(Ident),
    /// `rec X { C }`
    Rec { var: Ident, body: Box<Choreography> },
}

use Choreography as C;

impl Choreography {
    pub fn init(from: &str, to: &str, service: &str, session: &str, cont: Choreography) -> Self {
        C::Init {
            from: from.into(),
            to: to.into(),
            service: service.into(),
            session: session.into(),
            cont: Box::new(cont),
        }
    }

    pub fn com(from: &str, to: &str, session: &str, expr: Expr, var: &str, cont: Choreography) -> Self {
        C::Com {
            from: from.into(),
            to: to.into(),
            session: session.into(),
            expr,
            var: var.into(),
            cont: Box::new(cont),
        }
    }

    /// Rejects empty branch lists and duplicate labels.
    pub fn choice(
        from: &str,
        to: &str,
        session: &str,
        branches: Vec<(Ident, Choreography)>,
    ) -> Result<Self, AstError> {
        check_branches(&branches)?;
        Ok(C::Choice {
            from: from.into(),
            to: to.into(),
            session: session.into(),
            branches,
        })
    }

    pub fn par(l: Choreography, r: Choreography) -> Self {
        C::Par(Box::new(l), Box::new(r))
    }

    pub fn cond(guard: Expr, at: &str, then: Choreography, els: Choreography) -> Self {
        C::Cond {
            guard,
            at: at.into(),
            then: Box::new(then),
            els: Box::new(els),
        }
    }

    pub fn rec(var: &str, body: Choreography) -> Self {
        C::Rec {
            var: var.into(),
            body: Box::new(body),
        }
    }

    pub fn recvar(var: &str) -> Self {
        C::RecVar(var.into())
    }

    /// Left-nested parallel product; the empty product is `0`.
    pub fn product(parts: impl IntoIterator<Item = Choreography>) -> Self {
        parts
            .into_iter()
            .reduce(Choreography::par)
            .unwrap_or(C::Inaction)
    }

    /// Checks choice well-formedness throughout the tree.
    pub fn validate(&self) -> Result<(), AstError> {
        match self {
            C::Inaction | C::RecVar(_) => Ok(()),
            C::Init { cont, .. } | C::Com { cont, .. } => cont.validate(),
            C::Choice { branches, .. } => {
                check_branches(branches)?;
                branches.iter().try_for_each(|(_, c)| c.validate())
            }
            C::Par(l, r) => {
                l.validate()?;
                r.validate()
            }
            C::Cond { then, els, .. } => {
                then.validate()?;
                els.validate()
            }
            C::Rec { body, .. } => body.validate(),
        }
    }

    pub fn is_recursion_free(&self) -> bool {
        match self {
            C::Inaction => true,
            C::RecVar(_) | C::Rec { .. } => false,
            C::Init { cont, .. } | C::Com { cont, .. } => cont.is_recursion_free(),
            C::Choice { branches, .. } => branches.iter().all(|(_, c)| c.is_recursion_free()),
            C::Par(l, r) => l.is_recursion_free() && r.is_recursion_free(),
            C::Cond { then, els, .. } => then.is_recursion_free() && els.is_recursion_free(),
        }
    }

    /// The outermost recursion binder, if any (for error messages).
    pub fn first_recursion(&self) -> Option<&Ident> {
        match self {
            C::Inaction => None,
            C::RecVar(x) => Some(x),
            C::Rec { var, .. } => Some(var),
            C::Init { cont, .. } | C::Com { cont, .. } => cont.first_recursion(),
            C::Choice { branches, .. } => branches.iter().find_map(|(_, c)| c.first_recursion()),
            C::Par(l, r) => l.first_recursion().or_else(|| r.first_recursion()),
            C::Cond { then, els, .. } => then.first_recursion().or_else(|| els.first_recursion()),
        }
    }

    /// Free names of every sort.
    pub fn free_names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Name>) {
        let p = |id: &Ident| Name::new(NameSort::Participant, id.clone());
        match self {
            C::Inaction => {}
            C::Init { from, to, service, session, cont } => {
                out.insert(p(from));
                out.insert(p(to));
                out.insert(Name::new(NameSort::SharedChannel, service.clone()));
                let mut inner = BTreeSet::new();
                cont.collect_free(&mut inner);
                inner.remove(&Name::new(NameSort::SessionChannel, session.clone()));
                out.extend(inner);
            }
            C::Com { from, to, session, expr, var, cont } => {
                out.insert(p(from));
                out.insert(p(to));
                out.insert(Name::new(NameSort::SessionChannel, session.clone()));
                out.insert(Name::new(NameSort::Variable, var.clone()));
                expr.collect_names(out);
                cont.collect_free(out);
            }
            C::Choice { from, to, session, branches } => {
                out.insert(p(from));
                out.insert(p(to));
                out.insert(Name::new(NameSort::SessionChannel, session.clone()));
                for (l, c) in branches {
                    out.insert(Name::new(NameSort::BranchLabel, l.clone()));
                    c.collect_free(out);
                }
            }
            C::Par(l, r) => {
                l.collect_free(out);
                r.collect_free(out);
            }
            C::Cond { guard, at, then, els } => {
                out.insert(p(at));
                guard.collect_names(out);
                then.collect_free(out);
                els.collect_free(out);
            }
            C::RecVar(x) => {
                out.insert(Name::new(NameSort::ProcessVariable, x.clone()));
            }
            C::Rec { var, body } => {
                let mut inner = BTreeSet::new();
                body.collect_free(&mut inner);
                inner.remove(&Name::new(NameSort::ProcessVariable, var.clone()));
                out.extend(inner);
            }
        }
    }

    /// Identifiers of free session channels.
    pub fn free_sessions(&self) -> BTreeSet<Ident> {
        self.free_names()
            .into_iter()
            .filter(|n| n.sort == NameSort::SessionChannel)
            .map(|n| n.ident)
            .collect()
    }

    /// Every session identifier occurring anywhere, bound or free.
    pub fn all_sessions(&self, out: &mut BTreeSet<Ident>) {
        match self {
            C::Inaction | C::RecVar(_) => {}
            C::Init { session, cont, .. } => {
                out.insert(session.clone());
                cont.all_sessions(out);
            }
            C::Com { session, cont, .. } => {
                out.insert(session.clone());
                cont.all_sessions(out);
            }
            C::Choice { session, branches, .. } => {
                out.insert(session.clone());
                branches.iter().for_each(|(_, c)| c.all_sessions(out));
            }
            C::Par(l, r) => {
                l.all_sessions(out);
                r.all_sessions(out);
            }
            C::Cond { then, els, .. } => {
                then.all_sessions(out);
                els.all_sessions(out);
            }
            C::Rec { body, .. } => body.all_sessions(out),
        }
    }

    /// Literal values appearing in expressions.
    pub fn literals(&self, out: &mut BTreeSet<Value>) {
        match self {
            C::Inaction | C::RecVar(_) => {}
            C::Init { cont, .. } => cont.literals(out),
            C::Com { expr, cont, .. } => {
                expr.collect_literals(out);
                cont.literals(out);
            }
            C::Choice { branches, .. } => branches.iter().for_each(|(_, c)| c.literals(out)),
            C::Par(l, r) => {
                l.literals(out);
                r.literals(out);
            }
            C::Cond { guard, then, els, .. } => {
                guard.collect_literals(out);
                then.literals(out);
                els.literals(out);
            }
            C::Rec { body, .. } => body.literals(out),
        }
    }

    /// `C[new/old]` on session channels, alpha-renaming binders that would
    /// capture `new`.
    pub fn substitute_channel(&self, old: &Ident, new: &Ident) -> Choreography {
        if old == new {
            return self.clone();
        }
        let sub = |c: &Choreography| Box::new(c.substitute_channel(old, new));
        let swap = |k: &Ident| if k == old { new.clone() } else { k.clone() };
        match self {
            C::Inaction | C::RecVar(_) => self.clone(),
            C::Init { from, to, service, session, cont } => {
                if session == old {
                    return self.clone();
                }
                let (session, cont) = if session == new && cont.free_sessions().contains(old) {
                    let fresh = fresh_session(session, cont, &[old, new]);
                    let renamed = cont.substitute_channel(session, &fresh);
                    (fresh, Box::new(renamed.substitute_channel(old, new)))
                } else {
                    (session.clone(), sub(cont))
                };
                C::Init {
                    from: from.clone(),
                    to: to.clone(),
                    service: service.clone(),
                    session,
                    cont,
                }
            }
            C::Com { from, to, session, expr, var, cont } => C::Com {
                from: from.clone(),
                to: to.clone(),
                session: swap(session),
                expr: expr.clone(),
                var: var.clone(),
                cont: sub(cont),
            },
            C::Choice { from, to, session, branches } => C::Choice {
                from: from.clone(),
                to: to.clone(),
                session: swap(session),
                branches: branches
                    .iter()
                    .map(|(l, c)| (l.clone(), c.substitute_channel(old, new)))
                    .collect(),
            },
            C::Par(l, r) => C::Par(sub(l), sub(r)),
            C::Cond { guard, at, then, els } => C::Cond {
                guard: guard.clone(),
                at: at.clone(),
                then: sub(then),
                els: sub(els),
            },
            C::Rec { var, body } => C::Rec {
                var: var.clone(),
                body: sub(body),
            },
        }
    }

    /// One-step unfolding `μX.C ↦ C[μX.C/X]`.
    pub fn unfold(&self) -> Result<Choreography, AstError> {
        match self {
            C::Rec { var, body } => {
                let sessions = self.free_sessions();
                Ok(body.substitute_process(var, self, &sessions))
            }
            _ => Err(AstError::NotRecursion),
        }
    }

    /// `self[t/x]` for process variable `x`; `t_sessions` are the free
    /// session channels of `t`, which binders must not capture.
    fn substitute_process(&self, x: &Ident, t: &Choreography, t_sessions: &BTreeSet<Ident>) -> Choreography {
        let sub = |c: &Choreography| Box::new(c.substitute_process(x, t, t_sessions));
        match self {
            C::Inaction => C::Inaction,
            C::RecVar(y) if y == x => t.clone(),
            C::RecVar(_) => self.clone(),
            C::Rec { var, .. } if var == x => self.clone(),
            C::Rec { var, body } => C::Rec {
                var: var.clone(),
                body: sub(body),
            },
            C::Init { from, to, service, session, cont } => {
                let (session, cont) = if t_sessions.contains(session) && cont.mentions_process(x) {
                    let mut avoid: Vec<&Ident> = t_sessions.iter().collect();
                    avoid.push(session);
                    let fresh = fresh_session(session, cont, &avoid);
                    let renamed = cont.substitute_channel(session, &fresh);
                    (fresh, Box::new(renamed.substitute_process(x, t, t_sessions)))
                } else {
                    (session.clone(), sub(cont))
                };
                C::Init {
                    from: from.clone(),
                    to: to.clone(),
                    service: service.clone(),
                    session,
                    cont,
                }
            }
            C::Com { from, to, session, expr, var, cont } => C::Com {
                from: from.clone(),
                to: to.clone(),
                session: session.clone(),
                expr: expr.clone(),
                var: var.clone(),
                cont: sub(cont),
            },
            C::Choice { from, to, session, branches } => C::Choice {
                from: from.clone(),
                to: to.clone(),
                session: session.clone(),
                branches: branches
                    .iter()
                    .map(|(l, c)| (l.clone(), c.substitute_process(x, t, t_sessions)))
                    .collect(),
            },
            C::Par(l, r) => C::Par(sub(l), sub(r)),
            C::Cond { guard, at, then, els } => C::Cond {
                guard: guard.clone(),
                at: at.clone(),
                then: sub(then),
                els: sub(els),
            },
        }
    }

    fn mentions_process(&self, x: &Ident) -> bool {
        self.free_names()
            .contains(&Name::new(NameSort::ProcessVariable, x.clone()))
    }

    /// Alpha-canonical form: bound session channels and process variables
    /// renamed by binder depth, choice branches sorted by label.
    pub fn canonical(&self) -> Choreography {
        self.canon(&mut Vec::new(), &mut Vec::new())
    }

    fn canon(&self, ks: &mut Vec<(Ident, Ident)>, xs: &mut Vec<(Ident, Ident)>) -> Choreography {
        let look = |env: &Vec<(Ident, Ident)>, id: &Ident| {
            env.iter()
                .rev()
                .find(|(o, _)| o == id)
                .map(|(_, n)| n.clone())
                .unwrap_or_else(|| id.clone())
        };
        match self {
            C::Inaction => C::Inaction,
            C::Init { from, to, service, session, cont } => {
                let canon_name = Ident::from(format!("%{}", ks.len()));
                ks.push((session.clone(), canon_name.clone()));
                let cont = cont.canon(ks, xs);
                ks.pop();
                C::Init {
                    from: from.clone(),
                    to: to.clone(),
                    service: service.clone(),
                    session: canon_name,
                    cont: Box::new(cont),
                }
            }
            C::Com { from, to, session, expr, var, cont } => C::Com {
                from: from.clone(),
                to: to.clone(),
                session: look(ks, session),
                expr: expr.clone(),
                var: var.clone(),
                cont: Box::new(cont.canon(ks, xs)),
            },
            C::Choice { from, to, session, branches } => {
                let mut branches: Vec<_> = branches
                    .iter()
                    .map(|(l, c)| (l.clone(), c.canon(ks, xs)))
                    .collect();
                branches.sort();
                C::Choice {
                    from: from.clone(),
                    to: to.clone(),
                    session: look(ks, session),
                    branches,
                }
            }
            C::Par(l, r) => C::Par(Box::new(l.canon(ks, xs)), Box::new(r.canon(ks, xs))),
            C::Cond { guard, at, then, els } => C::Cond {
                guard: guard.clone(),
                at: at.clone(),
                then: Box::new(then.canon(ks, xs)),
                els: Box::new(els.canon(ks, xs)),
            },
            C::RecVar(x) => C::RecVar(look(xs, x)),
            C::Rec { var, body } => {
                let canon_name = Ident::from(format!("%X{}", xs.len()));
                xs.push((var.clone(), canon_name.clone()));
                let body = body.canon(ks, xs);
                xs.pop();
                C::Rec {
                    var: canon_name,
                    body: Box::new(body),
                }
            }
        }
    }

    /// Equality up to renaming of bound names and choice branch order.
    pub fn alpha_eq(&self, other: &Choreography) -> bool {
        self.canonical() == other.canonical()
    }

    /// Number of action prefixes (init, com, choice) in the term.
    pub fn prefix_count(&self) -> usize {
        match self {
            C::Inaction | C::RecVar(_) => 0,
            C::Init { cont, .. } | C::Com { cont, .. } => 1 + cont.prefix_count(),
            C::Choice { branches, .. } => 1 + branches.iter().map(|(_, c)| c.prefix_count()).sum::<usize>(),
            C::Par(l, r) => l.prefix_count() + r.prefix_count(),
            C::Cond { then, els, .. } => then.prefix_count() + els.prefix_count(),
            C::Rec { body, .. } => body.prefix_count(),
        }
    }
}

fn check_branches(branches: &[(Ident, Choreography)]) -> Result<(), AstError> {
    if branches.is_empty() {
        return Err(AstError::EmptyChoice);
    }
    let mut seen = BTreeSet::new();
    for (l, _) in branches {
        if !seen.insert(l) {
            return Err(AstError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

/// A session name based on `base` that is not free in `body`, not bound in
/// `body` and distinct from everything in `avoid`.
fn fresh_session(base: &Ident, body: &Choreography, avoid: &[&Ident]) -> Ident {
    let mut used = BTreeSet::new();
    body.all_sessions(&mut used);
    fresh_ident(base.base(), |s| {
        used.iter().any(|u| u.as_str() == s) || avoid.iter().any(|a| a.as_str() == s)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn com0(k: &str) -> Choreography {
        C::com("A", "B", k, Expr::located("x", "A"), "y", C::Inaction)
    }

    #[test]
    fn substitute_replaces_free_channel() {
        assert_eq!(com0("k").substitute_channel(&"k".into(), &"h".into()), com0("h"));
        assert_eq!(C::Inaction.substitute_channel(&"k".into(), &"h".into()), C::Inaction);
    }

    #[test]
    fn substitute_stops_at_rebinding() {
        let c = C::init("A", "B", "a", "k", com0("k"));
        assert_eq!(c.substitute_channel(&"k".into(), &"h".into()), c);
    }

    #[test]
    fn substitute_avoids_capture() {
        // init binds h; the free k must not become the bound h.
        let c = C::init("A", "B", "a", "h", C::par(com0("k"), com0("h")));
        let s = c.substitute_channel(&"k".into(), &"h".into());
        let C::Init { session, cont, .. } = &s else { panic!() };
        assert_ne!(session.as_str(), "h");
        assert_eq!(
            **cont,
            C::par(com0("h"), com0(session.as_str()))
        );
    }

    #[test]
    fn free_names_exclude_bound_session() {
        let c = C::init("A", "B", "a", "k", com0("k"));
        let expected = BTreeSet::from([
            Name::participant("A"),
            Name::participant("B"),
            Name::shared("a"),
            Name::variable("x"),
            Name::variable("y"),
        ]);
        assert_eq!(c.free_names(), expected);
        assert!(C::Inaction.free_names().is_empty());
        assert_eq!(C::recvar("X").free_names(), BTreeSet::from([Name::process_var("X")]));
    }

    #[test]
    fn unfold_examples() {
        let body = C::init("A", "B", "a", "k", C::recvar("X"));
        let r = C::rec("X", body);
        assert_eq!(r.unfold().unwrap(), C::init("A", "B", "a", "k", r.clone()));
        assert_eq!(C::rec("X", C::Inaction).unfold().unwrap(), C::Inaction);
        let r2 = C::rec("X", C::par(C::recvar("X"), C::Inaction));
        assert_eq!(r2.unfold().unwrap(), C::par(r2.clone(), C::Inaction));
        assert_eq!(C::Inaction.unfold(), Err(AstError::NotRecursion));
    }

    #[test]
    fn unfold_avoids_capturing_free_sessions() {
        // μX.(k-com | init(k). X): the free k must survive unfolding under the binder.
        let r = C::rec("X", C::par(com0("k"), C::init("A", "B", "a", "k", C::recvar("X"))));
        let u = r.unfold().unwrap();
        assert!(u.free_sessions().contains(&Ident::from("k")));
        let C::Par(_, right) = &u else { panic!() };
        let C::Init { session, cont, .. } = &**right else { panic!() };
        assert_ne!(session.as_str(), "k");
        assert!(cont.free_sessions().contains(&Ident::from("k")));
    }

    #[test]
    fn recursion_free_detection() {
        assert!(C::Inaction.is_recursion_free());
        assert!(!C::rec("X", C::recvar("X")).is_recursion_free());
        assert!(com0("k").is_recursion_free());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let bs = vec![("l".into(), C::Inaction), ("l".into(), C::Inaction)];
        assert_eq!(C::choice("A", "B", "k", bs), Err(AstError::DuplicateLabel("l".into())));
        assert_eq!(C::choice("A", "B", "k", vec![]), Err(AstError::EmptyChoice));
    }

    #[test]
    fn alpha_equivalence() {
        let a = C::init("A", "B", "a", "k", com0("k"));
        let b = C::init("A", "B", "a", "h", com0("h"));
        let c = C::init("A", "B", "a", "h", com0("k"));
        assert!(a.alpha_eq(&b));
        assert!(!a.alpha_eq(&c));
        let l1 = C::choice("A", "B", "k", vec![("l1".into(), C::Inaction), ("l2".into(), com0("k"))]).unwrap();
        let l2 = C::choice("A", "B", "k", vec![("l2".into(), com0("k")), ("l1".into(), C::Inaction)]).unwrap();
        assert!(l1.alpha_eq(&l2));
    }
}
