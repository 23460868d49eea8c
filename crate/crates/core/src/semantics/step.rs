use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::eval::eval_expr;
use crate::ast::{fresh_ident, ActionLabel, Choreography, Ident, Value, State};

/// A configuration `(σ, C)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    pub state: State,
    pub chor: Choreography,
}

impl Configuration {
    pub fn new(state: State, chor: Choreography) -> Self {
        Configuration { state, chor }
    }

    /// `(∅, C)`
    pub fn empty(chor: Choreography) -> Self {
        Configuration {
            state: State::new(),
            chor,
        }
    }
}

impl Serialize for Configuration {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Configuration", 2)?;
        st.serialize_field("state", &self.state)?;
        st.serialize_field("chor", &crate::syntax::print_choreography(&self.chor))?;
        st.end()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "([{}], {})",
            self.state,
            crate::syntax::print_choreography(&self.chor)
        )
    }
}

/// One labelled step `(σ, C) -ℓ-> target`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub label: ActionLabel,
    pub target: Configuration,
}

/// Serializable trace record: the label and the cells it changed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub label: ActionLabel,
    pub delta: Vec<StateWrite>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateWrite {
    pub var: Ident,
    pub at: Ident,
    pub value: Value,
}

impl TraceEntry {
    pub fn between(before: &State, t: &Transition) -> Self {
        TraceEntry {
            label: t.label.clone(),
            delta: before
                .delta(&t.target.state)
                .into_iter()
                .map(|(var, at, value)| StateWrite { var, at, value })
                .collect(),
        }
    }
}

/// Base of the session names chosen for `init` steps that no formula asks about.
pub const FRESH_SESSION_BASE: &str = "h";

/// How many recursion unfoldings a single call to [`step_with`] may perform.
/// Guarded recursion needs one per recursive thread at the head of the term;
/// unguarded loops such as `rec X { X }` exhaust it and contribute no further
/// transitions.
const UNFOLD_FUEL: usize = 64;

/// All transitions of `cfg`. Sessions opened by `init` receive the canonical
/// fresh name `h#n`, the least one not free in the configuration.
pub fn step(cfg: &Configuration) -> Vec<Transition> {
    step_with(cfg, &BTreeSet::new())
}

/// Like [`step`], but every name in `sessions` that is not free in the
/// configuration is offered as an additional fresh name for `init` steps.
/// Formulae can only tell apart the session names they mention, so this
/// finite set of choices stands for the infinitely many fresh names.
pub fn step_with(cfg: &Configuration, sessions: &BTreeSet<Ident>) -> Vec<Transition> {
    let free = cfg.chor.free_sessions();
    let generic = fresh_ident(FRESH_SESSION_BASE, |s| {
        let id = Ident::from(s);
        free.contains(&id) || sessions.contains(&id)
    });
    let mut candidates = vec![generic];
    candidates.extend(sessions.iter().filter(|k| !free.contains(*k)).cloned());
    let mut out = Vec::new();
    go(&cfg.state, &cfg.chor, &candidates, &mut UNFOLD_FUEL.clone(), &mut |label, state, chor| {
        out.push(Transition {
            label,
            target: Configuration { state, chor },
        })
    });
    let mut seen = BTreeSet::new();
    out.retain(|t| seen.insert(t.clone()));
    out
}

/// `Next(σ, C, ℓ)`. An `init` query matches the step that opens the session
/// under exactly the queried name, which is possible iff that name is not
/// already free in `C`.
pub fn next(cfg: &Configuration, label: &ActionLabel) -> Vec<Configuration> {
    let transitions = match label {
        ActionLabel::Init { session, .. } => {
            if cfg.chor.free_sessions().contains(session) {
                return Vec::new();
            }
            step_with(cfg, &BTreeSet::from([session.clone()]))
        }
        _ => step(cfg),
    };
    transitions
        .into_iter()
        .filter(|t| &t.label == label)
        .map(|t| t.target)
        .collect()
}

type Emit<'a> = dyn FnMut(ActionLabel, State, Choreography) + 'a;

fn go(state: &State, c: &Choreography, fresh: &[Ident], fuel: &mut usize, emit: &mut Emit<'_>) {
    use Choreography as C;
    match c {
        C::Inaction | C::RecVar(_) => {}
        C::Init {
            from,
            to,
            service,
            session,
            cont,
        } => {
            for h in fresh {
                emit(
                    ActionLabel::Init {
                        from: from.clone(),
                        to: to.clone(),
                        service: service.clone(),
                        session: h.clone(),
                    },
                    state.clone(),
                    cont.substitute_channel(session, h),
                );
            }
        }
        C::Com {
            from,
            to,
            session,
            expr,
            var,
            cont,
        } => {
            if let Ok(v) = eval_expr(state, expr, from) {
                emit(
                    ActionLabel::Com {
                        from: from.clone(),
                        to: to.clone(),
                        session: session.clone(),
                    },
                    state.with(var.clone(), to.clone(), v),
                    (**cont).clone(),
                );
            }
        }
        C::Choice {
            from,
            to,
            session,
            branches,
        } => {
            for (l, cont) in branches {
                emit(
                    ActionLabel::Branch {
                        from: from.clone(),
                        to: to.clone(),
                        session: session.clone(),
                        label: l.clone(),
                    },
                    state.clone(),
                    cont.clone(),
                );
            }
        }
        C::Par(l, r) => {
            go(state, l, fresh, fuel, &mut |label, s, l2| {
                emit(label, s, C::Par(Box::new(l2), r.clone()))
            });
            go(state, r, fresh, fuel, &mut |label, s, r2| {
                emit(label, s, C::Par(l.clone(), Box::new(r2)))
            });
        }
        C::Cond { guard, at, then, els } => match eval_expr(state, guard, at) {
            Ok(Value::Bool(true)) => go(state, then, fresh, fuel, emit),
            Ok(Value::Bool(false)) => go(state, els, fresh, fuel, emit),
            _ => {}
        },
        C::Rec { .. } => {
            if *fuel > 0 {
                *fuel -= 1;
                if let Ok(unfolded) = c.unfold() {
                    go(state, &unfolded, fresh, fuel, emit);
                }
            }
        }
    }
}

/// Why a conditional cannot move under a state, if it cannot.
#[derive(Debug, Clone, PartialEq)]
pub struct GuardDiagnostic {
    pub at: Ident,
    pub guard: crate::ast::Expr,
    pub problem: String,
}

/// Conditionals at the top of `cfg` (through parallel composition) whose
/// guard does not evaluate to a boolean; such conditionals are stuck.
pub fn guard_diagnostics(cfg: &Configuration) -> Vec<GuardDiagnostic> {
    fn walk(s: &State, c: &Choreography, out: &mut Vec<GuardDiagnostic>) {
        match c {
            Choreography::Par(l, r) => {
                walk(s, l, out);
                walk(s, r, out);
            }
            Choreography::Cond { guard, at, then, els } => match eval_expr(s, guard, at) {
                Ok(Value::Bool(true)) => walk(s, then, out),
                Ok(Value::Bool(false)) => walk(s, els, out),
                Ok(v) => out.push(GuardDiagnostic {
                    at: at.clone(),
                    guard: guard.clone(),
                    problem: format!("guard evaluates to the {} {v}, not a boolean", v.type_name()),
                }),
                Err(e) => out.push(GuardDiagnostic {
                    at: at.clone(),
                    guard: guard.clone(),
                    problem: e.to_string(),
                }),
            },
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(&cfg.state, &cfg.chor, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_choreography, parse_state};

    fn cfg(state: &str, chor: &str) -> Configuration {
        Configuration::new(parse_state(state).unwrap(), parse_choreography(chor).unwrap())
    }

    const OB: &str = "Cust -> AC : ob(k1). Cust -> AC : k1<booking, x>. AC -> AC' : ob(k2). \
                      AC -> AC' : k2<x, x'>. AC' -> AC : k2<offer, y>. AC -> Cust : k1<y, y''>. \
                      Cust -> AC : k1<accept, z>. 0";

    #[test]
    fn online_booking_first_step_opens_a_fresh_session() {
        let c = cfg("booking@Cust = 1", OB);
        let ts = step(&c);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].label, ActionLabel::init("Cust", "AC", "ob", "h#1"));
        match &ts[0].target.chor {
            Choreography::Com { session, .. } => assert_eq!(session.as_str(), "h#1"),
            other => panic!("unexpected continuation {other:?}"),
        }
    }

    #[test]
    fn fresh_name_avoids_free_sessions() {
        let c = cfg("", "A -> B : a(k). 0 | A -> B : h#1[+]{l: 0}");
        let ts = step(&c);
        assert!(ts.iter().any(|t| t.label == ActionLabel::init("A", "B", "a", "h#2")));
    }

    #[test]
    fn conditional_selects_one_branch() {
        let c = cfg("e@A = true", "if e@A then A -> B : k<1, x>. 0 else A -> B : k<2, y>. 0");
        let ts = step(&c);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].target.state.get(&"x".into(), &"B".into()), Some(&Value::Int(1)));
        let stuck = cfg("e@A = 3", "if e@A then A -> B : k<1, x>. 0 else 0");
        assert!(step(&stuck).is_empty());
        assert_eq!(guard_diagnostics(&stuck).len(), 1);
    }

    #[test]
    fn communication_writes_the_receiver() {
        let c = cfg("x@A = 5", "A -> B : k<x@A, y>. 0");
        let ts = step(&c);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].label, ActionLabel::com("A", "B", "k"));
        assert_eq!(ts[0].target.state.get(&"y".into(), &"B".into()), Some(&Value::Int(5)));
        assert_eq!(ts[0].target.chor, Choreography::Inaction);
        // a failed premise disables the rule
        assert!(step(&cfg("", "A -> B : k<x@A, y>. 0")).is_empty());
    }

    #[test]
    fn next_filters_by_label() {
        let c = cfg("", OB);
        assert_eq!(next(&c, &ActionLabel::init("Cust", "AC", "ob", "k")).len(), 1);
        assert!(next(&c, &ActionLabel::com("Cust", "AC", "k")).is_empty());
        let choice = cfg("", "A -> B : k[+]{l1: A -> B : k<1, x>. 0, l2: 0}");
        let got = next(&choice, &ActionLabel::branch("A", "B", "k", "l2"));
        assert_eq!(got, vec![Configuration::empty(Choreography::Inaction)]);
    }

    #[test]
    fn init_query_cannot_reuse_a_free_session() {
        let c = cfg("", "A -> B : a(k). 0 | A -> B : k<1, x>. 0");
        assert!(next(&c, &ActionLabel::init("A", "B", "a", "k")).is_empty());
        assert_eq!(next(&c, &ActionLabel::init("A", "B", "a", "j")).len(), 1);
    }

    #[test]
    fn parallel_moves_either_side_and_never_synchronises() {
        let c = cfg("", "A -> B : k[+]{l: 0} | C -> D : j[+]{m: 0}");
        let ts = step(&c);
        assert_eq!(ts.len(), 2);
        assert!(ts.iter().any(|t| t.label.session().as_str() == "k"));
        assert!(ts.iter().any(|t| t.label.session().as_str() == "j"));
    }

    #[test]
    fn recursion_unfolds_on_demand() {
        let c = cfg("", "rec X { A -> B : k[+]{again: X, stop: 0} }");
        let ts = step(&c);
        assert_eq!(ts.len(), 2);
        assert!(step(&cfg("", "rec X { X }")).is_empty());
        assert!(step(&cfg("", "rec X { X | X }")).is_empty());
    }
}
