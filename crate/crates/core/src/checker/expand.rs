use std::collections::BTreeSet;

use crate::ast::{fresh_ident, ActionLabel, Binder, Expr, Formula, Ident, Located, NameSort, QuantSort};

/// The participant used by the constant encodings of `true` and `false`.
/// The literals read no variable, so it contributes no free name.
const CONST_SITE: &str = "A";

fn constant(v: i64) -> Located {
    Located::new(Expr::int(v), CONST_SITE)
}

/// Rewrites every derived operator into the eight core constructors:
///
/// * `true ≝ 0@A = 0@A`, `false ≝ 0@A = 1@A`
/// * `∨`, `⇒`, `∀` by de Morgan
/// * `□φ ≝ ¬◇¬φ`, `[ℓ]φ ≝ ¬⟨ℓ⟩¬φ`
/// * `◦φ ≝ ∃ℓ.⟨ℓ⟩φ`, spelled out over the three label shapes
/// * `Interact(A, B)φ`: some init, com or branch from `A` to `B`, then `φ`
///
/// Names bound by the expansion avoid every name already used by the body.
pub fn expand_derived(f: &Formula) -> Formula {
    use Formula as F;
    let e = |a: &Formula| Box::new(expand_derived(a));
    match f {
        F::End | F::Eq(..) => f.clone(),
        F::True => F::Eq(constant(0), constant(0)),
        F::False => F::Eq(constant(0), constant(1)),
        F::Exists(b, a) => F::Exists(b.clone(), e(a)),
        F::And(a, b) => F::And(e(a), e(b)),
        F::Neg(a) => F::Neg(e(a)),
        F::Action(l, a) => F::Action(l.clone(), e(a)),
        F::Par(a, b) => F::Par(e(a), e(b)),
        F::May(a) => F::May(e(a)),
        F::Or(a, b) => or(expand_derived(a), expand_derived(b)),
        F::Implies(a, b) => or(F::neg(expand_derived(a)), expand_derived(b)),
        F::Forall(b, a) => F::neg(F::Exists(b.clone(), Box::new(F::neg(expand_derived(a))))),
        F::Always(a) => F::neg(F::may(F::neg(expand_derived(a)))),
        F::Must(l, a) => F::neg(F::action(l.clone(), F::neg(expand_derived(a)))),
        F::Next(a) | F::ExistsLabel(a) => some_step(None, expand_derived(a)),
        F::Interact(p, q, a) => some_step(Some((p.clone(), q.clone())), expand_derived(a)),
    }
}

fn or(a: Formula, b: Formula) -> Formula {
    Formula::neg(Formula::and(Formula::neg(a), Formula::neg(b)))
}

/// `∃ℓ.⟨ℓ⟩φ`, optionally with the endpoints of `ℓ` fixed.
fn some_step(ends: Option<(Ident, Ident)>, body: Formula) -> Formula {
    let mut used: [BTreeSet<Ident>; 4] = Default::default();
    let sorts = [
        NameSort::Participant,
        NameSort::SharedChannel,
        NameSort::SessionChannel,
        NameSort::BranchLabel,
    ];
    for (set, sort) in used.iter_mut().zip(sorts) {
        body.all_idents(sort, set);
    }
    if let Some((p, q)) = &ends {
        used[0].insert(p.clone());
        used[0].insert(q.clone());
    }
    let pick = |i: usize, base: &str| fresh_ident(base, |s| used[i].iter().any(|u| u.as_str() == s));

    let (from, to, mut binders) = match &ends {
        Some((p, q)) => (p.clone(), q.clone(), Vec::new()),
        None => {
            let (a, b) = (pick(0, "p_"), pick(0, "q_"));
            let bs = vec![
                Binder { var: a.clone(), sort: QuantSort::Participant },
                Binder { var: b.clone(), sort: QuantSort::Participant },
            ];
            (a, b, bs)
        }
    };
    let (service, session, label) = (pick(1, "a_"), pick(2, "k_"), pick(3, "l_"));
    let shared = Binder { var: service.clone(), sort: QuantSort::Shared };
    let chan = Binder { var: session.clone(), sort: QuantSort::Session };
    let lab = Binder { var: label.clone(), sort: QuantSort::Label };

    let quantify = |bs: Vec<Binder>, l: ActionLabel| {
        bs.into_iter()
            .rev()
            .fold(Formula::action(l, body.clone()), |acc, b| Formula::Exists(b, Box::new(acc)))
    };
    let base = std::mem::take(&mut binders);
    let with = |extra: &[&Binder]| {
        let mut v = base.clone();
        v.extend(extra.iter().map(|b| (*b).clone()));
        v
    };
    let init = quantify(
        with(&[&shared, &chan]),
        ActionLabel::Init { from: from.clone(), to: to.clone(), service, session: session.clone() },
    );
    let com = quantify(
        with(&[&chan]),
        ActionLabel::Com { from: from.clone(), to: to.clone(), session: session.clone() },
    );
    let branch = quantify(with(&[&chan, &lab]), ActionLabel::Branch { from, to, session, label });
    or(or(init, com), branch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_formula;

    #[test]
    fn truth_constants() {
        assert_eq!(expand_derived(&Formula::True), Formula::Eq(constant(0), constant(0)));
        assert_eq!(expand_derived(&Formula::False), Formula::Eq(constant(0), constant(1)));
        assert!(Formula::Eq(constant(0), constant(0)).free_names().is_empty());
    }

    #[test]
    fn box_is_not_may_not() {
        let f = expand_derived(&Formula::always(Formula::End));
        assert_eq!(f, Formula::neg(Formula::may(Formula::neg(Formula::End))));
    }

    #[test]
    fn next_quantifies_over_three_label_shapes() {
        let f = expand_derived(&Formula::Next(Box::new(Formula::End)));
        assert!(f.is_core());
        let printed = crate::syntax::print_formula(&f);
        assert!(printed.contains("<init p_#1->q_#1 a_#1(k_#1)> end"), "{printed}");
        assert!(printed.contains("<com p_#1->q_#1 k_#1> end"), "{printed}");
        assert!(printed.contains("<branch p_#1->q_#1 k_#1 [l_#1]> end"), "{printed}");
        assert!(f.free_names().is_empty());
    }

    #[test]
    fn interact_fixes_endpoints() {
        let f = expand_derived(&parse_formula("interact(A, B) true").unwrap());
        assert!(f.is_core());
        let names: Vec<_> = f.free_names().into_iter().map(|n| n.ident.to_string()).collect();
        assert_eq!(names, vec!["A", "B"]);
    }

    #[test]
    fn expansion_avoids_capture() {
        let f = parse_formula("next <com A->B k_#1> end").unwrap();
        let g = expand_derived(&f);
        let printed = crate::syntax::print_formula(&g);
        assert!(printed.contains("k_#2"), "{printed}");
        assert!(g.free_names().iter().any(|n| n.ident.as_str() == "k_#1"));
    }

    #[test]
    fn everything_expands_to_core() {
        let f = parse_formula(
            "forall A:participant . box (interact(A, B) true => exists C:participant . \
             (interact(A, B) interact(B, C) true \\/ interact(A, B) ~next true)) & [com A->B k] false",
        )
        .unwrap();
        assert!(expand_derived(&f).is_core());
    }
}
