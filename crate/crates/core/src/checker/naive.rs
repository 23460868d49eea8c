//! Direct reading of the satisfaction relation `C ⊨σ φ`, written without
//! the proof system's machinery (no `Norm`, `Next`, `Reachable` or memo) so
//! that it can serve as an oracle for it.

use std::collections::BTreeSet;

use super::domain::quantifier_domain;
use super::entails::CheckError;
use super::expand::expand_derived;
use crate::ast::{Choreography, Formula, Ident, NameSort};
use crate::semantics::{eval_expr, step_with, struct_equiv, Configuration};

/// `C ⊨σ φ` for recursion-free `C`. Derived operators are expanded first.
pub fn satisfies_naive(cfg: &Configuration, f: &Formula) -> Result<bool, CheckError> {
    if let Some(x) = cfg.chor.first_recursion() {
        return Err(CheckError::RecursionNotSupported(x.clone()));
    }
    Ok(sat(cfg, &expand_derived(f)))
}

fn session_names(f: &Formula) -> BTreeSet<Ident> {
    f.free_names()
        .into_iter()
        .filter(|n| n.sort == NameSort::SessionChannel)
        .map(|n| n.ident)
        .collect()
}

fn sat(cfg: &Configuration, f: &Formula) -> bool {
    match f {
        // C ≡ 0
        Formula::End => struct_equiv(&cfg.chor, &Choreography::Inaction).unwrap_or(false),
        // σ(e1@A) ⇓ v and σ(e2@B) ⇓ v
        Formula::Eq(l, r) => match (
            eval_expr(&cfg.state, &l.expr, &l.at),
            eval_expr(&cfg.state, &r.expr, &r.at),
        ) {
            (Ok(v1), Ok(v2)) => v1 == v2,
            _ => false,
        },
        Formula::And(a, b) => sat(cfg, a) && sat(cfg, b),
        Formula::Neg(a) => !sat(cfg, a),
        // (σ, C) -ℓ-> (σ', C') and C' ⊨σ' φ
        Formula::Action(l, a) => {
            let names: BTreeSet<Ident> = match l {
                crate::ast::ActionLabel::Init { session, .. } => BTreeSet::from([session.clone()]),
                _ => BTreeSet::new(),
            };
            step_with(cfg, &names)
                .into_iter()
                .any(|t| &t.label == l && sat(&t.target, a))
        }
        // (σ, C) ->* (σ', C') and C' ⊨σ' φ
        Formula::May(a) => {
            let names = session_names(a);
            let mut stack = vec![cfg.clone()];
            let mut seen = BTreeSet::new();
            while let Some(c) = stack.pop() {
                if !seen.insert(c.clone()) {
                    continue;
                }
                if sat(&c, a) {
                    return true;
                }
                stack.extend(step_with(&c, &names).into_iter().map(|t| t.target));
            }
            false
        }
        // C ≡ C1 | C2 with C1 ⊨σ φ and C2 ⊨σ χ
        Formula::Par(a, b) => splits(&cfg.chor).into_iter().any(|(c1, c2)| {
            sat(&Configuration::new(cfg.state.clone(), c1), a) && sat(&Configuration::new(cfg.state.clone(), c2), b)
        }),
        // φ[w/x] for some appropriate w
        Formula::Exists(binder, body) => quantifier_domain(cfg, f, binder.sort)
            .iter()
            .any(|w| sat(cfg, &body.subst(binder.sort, &binder.var, w))),
        _ => sat(cfg, &expand_derived(f)),
    }
}

/// Every way of writing `C ≡ C1 | C2` by sending each parallel thread of `C`
/// to one side.
fn splits(c: &Choreography) -> Vec<(Choreography, Choreography)> {
    fn join(a: Choreography, b: Choreography) -> Choreography {
        match (a, b) {
            (Choreography::Inaction, x) | (x, Choreography::Inaction) => x,
            (x, y) => Choreography::Par(Box::new(x), Box::new(y)),
        }
    }
    match c {
        Choreography::Inaction => vec![(Choreography::Inaction, Choreography::Inaction)],
        Choreography::Par(l, r) => {
            let (ls, rs) = (splits(l), splits(r));
            let mut out = Vec::with_capacity(ls.len() * rs.len());
            for (l1, l2) in &ls {
                for (r1, r2) in &rs {
                    out.push((join(l1.clone(), r1.clone()), join(l2.clone(), r2.clone())));
                }
            }
            out
        }
        thread => vec![
            (thread.clone(), Choreography::Inaction),
            (Choreography::Inaction, thread.clone()),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_choreography, parse_formula};

    #[test]
    fn inaction_does_not_satisfy_not_end() {
        let cfg = Configuration::empty(Choreography::Inaction);
        assert!(!satisfies_naive(&cfg, &Formula::neg(Formula::End)).unwrap());
        assert!(satisfies_naive(&cfg, &Formula::End).unwrap());
    }

    #[test]
    fn splits_cover_every_assignment() {
        let c = parse_choreography("A -> B : k<1, x>. 0 | (0 | C -> D : j<1, y>. 0)").unwrap();
        assert_eq!(splits(&c).len(), 4);
    }

    #[test]
    fn par_formula() {
        let cfg = Configuration::empty(parse_choreography("A -> B : k<1, x>. 0 | C -> D : j<2, y>. 0").unwrap());
        let f = parse_formula("<com A->B k> end | <com C->D j> end").unwrap();
        assert!(satisfies_naive(&cfg, &f).unwrap());
    }
}
