use thiserror::Error;

use crate::ast::{Choreography, Ident};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("`rec {0}` is not supported here: the choreography must be recursion-free")]
    RecursionNotSupported(Ident),
    #[error("exploring a recursive choreography (`rec {0}`) needs a step budget")]
    RecursionWithoutBudget(Ident),
}

fn reject_recursion(c: &Choreography) -> Result<(), SemanticsError> {
    match c.first_recursion() {
        Some(x) => Err(SemanticsError::RecursionNotSupported(x.clone())),
        None => Ok(()),
    }
}

/// `Norm(C)`: the parallel components of `C` that are neither `0` nor a
/// parallel composition, in left-to-right order.
pub fn norm(c: &Choreography) -> Result<Vec<Choreography>, SemanticsError> {
    reject_recursion(c)?;
    let mut out = Vec::new();
    flatten(c, &mut out);
    Ok(out)
}

fn flatten(c: &Choreography, out: &mut Vec<Choreography>) {
    match c {
        Choreography::Inaction => {}
        Choreography::Par(l, r) => {
            flatten(l, out);
            flatten(r, out);
        }
        other => out.push(other.clone()),
    }
}

/// A representative of the structural-congruence class of `c` with respect
/// to the monoid laws of `|` and `0` and alpha-renaming: binders are
/// canonically named, parallel components are flattened, sorted and
/// re-associated to the left, and `0` components are dropped, all the way
/// down. Recursive terms are accepted (they are not unfolded).
pub fn normal_form(c: &Choreography) -> Choreography {
    nf(&c.canonical())
}

fn nf(c: &Choreography) -> Choreography {
    use Choreography as C;
    match c {
        C::Inaction | C::RecVar(_) => c.clone(),
        C::Par(..) => {
            let mut parts = Vec::new();
            flatten(c, &mut parts);
            let mut parts: Vec<_> = parts.iter().map(nf).collect();
            parts.sort();
            Choreography::product(parts)
        }
        C::Init {
            from,
            to,
            service,
            session,
            cont,
        } => C::Init {
            from: from.clone(),
            to: to.clone(),
            service: service.clone(),
            session: session.clone(),
            cont: Box::new(nf(cont)),
        },
        C::Com {
            from,
            to,
            session,
            expr,
            var,
            cont,
        } => C::Com {
            from: from.clone(),
            to: to.clone(),
            session: session.clone(),
            expr: expr.clone(),
            var: var.clone(),
            cont: Box::new(nf(cont)),
        },
        C::Choice {
            from,
            to,
            session,
            branches,
        } => C::Choice {
            from: from.clone(),
            to: to.clone(),
            session: session.clone(),
            branches: branches.iter().map(|(l, b)| (l.clone(), nf(b))).collect(),
        },
        C::Cond { guard, at, then, els } => C::Cond {
            guard: guard.clone(),
            at: at.clone(),
            then: Box::new(nf(then)),
            els: Box::new(nf(els)),
        },
        C::Rec { var, body } => C::Rec {
            var: var.clone(),
            body: Box::new(nf(body)),
        },
    }
}

/// `C1 ≡ C2` for recursion-free terms: equal normalised multisets of
/// components, compared up to alpha and recursively inside continuations.
pub fn struct_equiv(c1: &Choreography, c2: &Choreography) -> Result<bool, SemanticsError> {
    reject_recursion(c1)?;
    reject_recursion(c2)?;
    Ok(normal_form(c1) == normal_form(c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_choreography;

    fn p(s: &str) -> Choreography {
        parse_choreography(s).unwrap()
    }

    #[test]
    fn norm_of_inaction_is_empty() {
        assert!(norm(&Choreography::Inaction).unwrap().is_empty());
    }

    #[test]
    fn norm_flattens_and_drops_inaction() {
        let com = p("A -> B : k<1, y>. 0");
        assert_eq!(norm(&Choreography::par(Choreography::Inaction, com.clone())).unwrap(), vec![com]);
        let (a, b, c) = (p("A -> B : k[+]{l: 0}"), p("B -> C : k<1, x>. 0"), p("A -> B : a(k). 0"));
        let t = Choreography::par(a.clone(), Choreography::par(b.clone(), c.clone()));
        assert_eq!(norm(&t).unwrap(), vec![a, b, c]);
        assert_eq!(norm(&p("if x@A then 0 | 0 else 0")).unwrap().len(), 1);
    }

    #[test]
    fn norm_rejects_recursion() {
        assert_eq!(
            norm(&p("rec X { X }")),
            Err(SemanticsError::RecursionNotSupported(Ident::from("X")))
        );
    }

    #[test]
    fn monoid_laws_and_alpha() {
        let c = p("A -> B : k<1, y>. 0");
        assert!(struct_equiv(&Choreography::par(Choreography::Inaction, c.clone()), &c).unwrap());
        let (x, y) = (p("A -> B : k[+]{l: 0}"), p("B -> C : j<1, x>. 0"));
        assert!(struct_equiv(
            &Choreography::par(x.clone(), y.clone()),
            &Choreography::par(y.clone(), x.clone())
        )
        .unwrap());
        assert!(struct_equiv(&p("A -> B : a(k). 0"), &p("A -> B : a(h). 0")).unwrap());
        assert!(struct_equiv(
            &p("A -> B : a(k). (A -> B : k<1, x>. 0 | 0)"),
            &p("A -> B : a(h). A -> B : h<1, x>. 0")
        )
        .unwrap());
        assert!(!struct_equiv(&x, &y).unwrap());
        assert!(!struct_equiv(&p("A -> B : k<1, y>. 0"), &p("A -> B : j<1, y>. 0")).unwrap());
    }
}
