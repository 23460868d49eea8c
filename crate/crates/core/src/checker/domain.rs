use std::collections::BTreeSet;

use crate::ast::{fresh_ident, Formula, Ident, NameSort, QuantSort, Value, Witness};
use crate::semantics::Configuration;

/// Candidate witnesses for a quantifier of sort `sort` in `f` (normally the
/// `∃x.φ` node itself, so that `x` is not counted as free).
///
/// * name sorts: the names of that sort free in the choreography or in `f`;
/// * `kchan` additionally offers one name fresh for both, so that a
///   quantified session can be matched by a future `init`;
/// * `expr`: free variable names, every value stored in the state and every
///   literal of the choreography or `f`.
///
/// Restricting witnesses to these names is complete for recursion-free terms:
/// any other name behaves like the fresh one.
pub fn quantifier_domain(cfg: &Configuration, f: &Formula, sort: QuantSort) -> Vec<Witness> {
    let name_sort = sort.name_sort();
    let fn_c = cfg.chor.free_names();
    let fn_f = f.free_names();
    let names: BTreeSet<Ident> = fn_c
        .iter()
        .chain(fn_f.iter())
        .filter(|n| n.sort == name_sort)
        .map(|n| n.ident.clone())
        .collect();
    let mut out: Vec<Witness> = names.iter().cloned().map(Witness::Name).collect();
    match sort {
        QuantSort::Session => {
            let base = match f {
                Formula::Exists(b, _) if b.sort == QuantSort::Session => b.var.base().to_string(),
                _ => "k".to_string(),
            };
            out.push(Witness::Name(fresh_session_witness(&base, &names, f)));
        }
        QuantSort::Expr => {
            let mut values: BTreeSet<Value> = cfg.state.values().cloned().collect();
            cfg.chor.literals(&mut values);
            f.literals(&mut values);
            out.extend(values.into_iter().map(Witness::Value));
        }
        _ => {}
    }
    out
}

fn fresh_session_witness(base: &str, free: &BTreeSet<Ident>, f: &Formula) -> Ident {
    // Bound session names of `f` are avoided too so that the witness reads
    // unambiguously in printed proofs.
    let mut used = free.clone();
    f.all_idents(NameSort::SessionChannel, &mut used);
    fresh_ident(base, |s| used.iter().any(|u| u.as_str() == s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Choreography;
    use crate::syntax::{parse_choreography, parse_formula, parse_state};

    fn names(ws: &[Witness]) -> Vec<String> {
        ws.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn participants_of_online_booking() {
        let c = parse_choreography(
            "Cust -> AC : ob(k1). Cust -> AC : k1<booking, x>. AC -> AC' : ob(k2). \
             AC -> AC' : k2<x, x'>. AC' -> AC : k2<offer, y>. AC -> Cust : k1<y, y''>. \
             Cust -> AC : k1<accept, z>. 0",
        )
        .unwrap();
        let f = crate::checker::expand_derived(
            &parse_formula("exists B:participant . <init Cust->B ob(k)> true").unwrap(),
        );
        let d = quantifier_domain(&Configuration::empty(c), &f, QuantSort::Participant);
        assert_eq!(names(&d), vec!["AC", "AC'", "Cust"]);
    }

    #[test]
    fn empty_configuration() {
        let cfg = Configuration::empty(Choreography::Inaction);
        for sort in [QuantSort::Participant, QuantSort::Shared, QuantSort::Label, QuantSort::Expr] {
            assert!(quantifier_domain(&cfg, &Formula::End, sort).is_empty(), "{sort}");
        }
        // sessions always offer one fresh name
        assert_eq!(names(&quantifier_domain(&cfg, &Formula::End, QuantSort::Session)), vec!["k#1"]);
    }

    #[test]
    fn expression_domain_collects_values() {
        let cfg = Configuration::new(parse_state("r@B = 1").unwrap(), Choreography::Inaction);
        let f = parse_formula("exists v:expr . v@B = 2@B").unwrap();
        let d = quantifier_domain(&cfg, &f, QuantSort::Expr);
        assert_eq!(d, vec![Witness::Value(Value::Int(1)), Witness::Value(Value::Int(2))]);
    }

    #[test]
    fn fresh_session_avoids_free_and_bound_names() {
        let cfg = Configuration::empty(parse_choreography("A -> B : kk#1<1, x>. 0").unwrap());
        let f = parse_formula("exists kk:kchan . exists kk#2:kchan . end").unwrap();
        let d = quantifier_domain(&cfg, &f, QuantSort::Session);
        assert_eq!(names(&d), vec!["kk#1", "kk#3"]);
    }
}
