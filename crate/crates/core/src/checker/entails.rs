use std::collections::{BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::domain::quantifier_domain;
use super::expand::expand_derived;
use crate::ast::{ActionLabel, Choreography, Formula, Ident, Located, NameSort, Value, Witness};
use crate::semantics::{eval_expr, next, norm, reachable_with, Configuration, SemanticsError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("`rec {0}` is not supported: the proof system only decides recursion-free choreographies")]
    RecursionNotSupported(Ident),
    #[error("check cancelled")]
    Cancelled,
}

impl From<SemanticsError> for CheckError {
    fn from(e: SemanticsError) -> Self {
        match e {
            SemanticsError::RecursionNotSupported(x) | SemanticsError::RecursionWithoutBudget(x) => {
                CheckError::RecursionNotSupported(x)
            }
        }
    }
}

/// A derivation in the proof system, one node per rule application. Each
/// node records the choice that made the rule applicable.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Proof {
    /// `Norm(C) = []`
    End,
    /// both sides evaluate to `value`
    Eq { value: Value },
    And { left: Box<Proof>, right: Box<Proof> },
    /// the negated formula has no derivation
    Neg,
    /// `Norm(C)` split into the components at `left` and at `right`
    Par {
        left: Vec<usize>,
        right: Vec<usize>,
        left_proof: Box<Proof>,
        right_proof: Box<Proof>,
    },
    Action { target: Configuration, proof: Box<Proof> },
    May { target: Configuration, proof: Box<Proof> },
    Exists { witness: Witness, proof: Box<Proof> },
}

/// Outcome of [`entails`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// A derivation of the (expanded) formula, when requested and it holds.
    pub witness: Option<Proof>,
    /// Number of distinct judgments decided.
    pub judgments: u64,
}

/// Decides `C ⊢σ φ` for recursion-free `C`, memoising every judgment.
///
/// A checker may be reused across queries; the cache only ever stores
/// verdicts of the proof system, so reuse never changes an answer.
#[derive(Default)]
pub struct Checker {
    memo: HashMap<(Configuration, Formula), bool>,
    reach: HashMap<(Configuration, BTreeSet<Ident>), Rc<Vec<Configuration>>>,
    progress: Option<Arc<AtomicU64>>,
    cancel: Option<Arc<AtomicBool>>,
    judgments: u64,
}

impl Checker {
    pub fn new() -> Self {
        Checker::default()
    }

    /// Publish the running number of decided judgments into `counter`.
    pub fn with_progress(mut self, counter: Arc<AtomicU64>) -> Self {
        self.progress = Some(counter);
        self
    }

    /// Abort with [`CheckError::Cancelled`] once `flag` is set.
    pub fn with_cancel(mut self, flag: Arc<AtomicBool>) -> Self {
        self.cancel = Some(flag);
        self
    }

    pub fn entails(&mut self, cfg: &Configuration, f: &Formula) -> Result<Verdict, CheckError> {
        self.run(cfg, f, false)
    }

    /// Like [`Checker::entails`], recording a derivation when the formula holds.
    pub fn prove(&mut self, cfg: &Configuration, f: &Formula) -> Result<Verdict, CheckError> {
        self.run(cfg, f, true)
    }

    fn run(&mut self, cfg: &Configuration, f: &Formula, witness: bool) -> Result<Verdict, CheckError> {
        if let Some(x) = cfg.chor.first_recursion() {
            return Err(CheckError::RecursionNotSupported(x.clone()));
        }
        let f = expand_derived(f);
        let holds = self.holds(cfg, &f)?;
        let witness = if holds && witness { Some(self.derive(cfg, &f)?) } else { None };
        Ok(Verdict {
            holds,
            witness,
            judgments: self.judgments,
        })
    }

    /// `C ⊢σ φ` for a core formula.
    pub(crate) fn holds(&mut self, cfg: &Configuration, f: &Formula) -> Result<bool, CheckError> {
        let key = (cfg.clone(), f.clone());
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        if self.cancel.as_ref().is_some_and(|c| c.load(Ordering::Relaxed)) {
            return Err(CheckError::Cancelled);
        }
        let v = self.decide(cfg, f)?;
        self.judgments += 1;
        if let Some(p) = &self.progress {
            p.store(self.judgments, Ordering::Relaxed);
        }
        self.memo.insert(key, v);
        Ok(v)
    }

    fn decide(&mut self, cfg: &Configuration, f: &Formula) -> Result<bool, CheckError> {
        Ok(match f {
            Formula::End => norm(&cfg.chor)?.is_empty(),
            Formula::Eq(l, r) => equal_values(cfg, l, r).is_some(),
            Formula::And(a, b) => self.holds(cfg, a)? && self.holds(cfg, b)?,
            Formula::Neg(a) => !self.holds(cfg, a)?,
            Formula::Par(a, b) => self.split(cfg, a, b)?.is_some(),
            Formula::Action(l, a) => self.action(cfg, l, a)?.is_some(),
            Formula::May(a) => self.may(cfg, a)?.is_some(),
            Formula::Exists(..) => self.exists(cfg, f)?.is_some(),
            sugar => return self.holds(cfg, &expand_derived(sugar)),
        })
    }

    /// P_par: some partition `(I, J)` of `Norm(C)` with `∏I ⊢ φ1`, `∏J ⊢ φ2`.
    #[allow(clippy::type_complexity)]
    fn split(
        &mut self,
        cfg: &Configuration,
        a: &Formula,
        b: &Formula,
    ) -> Result<Option<(Vec<usize>, Vec<usize>, Configuration, Configuration)>, CheckError> {
        let parts = norm(&cfg.chor)?;
        let n = parts.len();
        assert!(n < 32, "too many parallel components ({n}) to enumerate partitions");
        for mask in 0u32..(1u32 << n) {
            let (left, right): (Vec<usize>, Vec<usize>) = (0..n).partition(|i| mask & (1 << i) != 0);
            let side = |ix: &[usize]| {
                Configuration::new(cfg.state.clone(), Choreography::product(ix.iter().map(|&i| parts[i].clone())))
            };
            let (lc, rc) = (side(&left), side(&right));
            if self.holds(&lc, a)? && self.holds(&rc, b)? {
                return Ok(Some((left, right, lc, rc)));
            }
        }
        Ok(None)
    }

    /// P_action: some `(σ', C') ∈ Next(σ, C, ℓ)` with `C' ⊢σ' φ`.
    fn action(&mut self, cfg: &Configuration, l: &ActionLabel, a: &Formula) -> Result<Option<Configuration>, CheckError> {
        for target in next(cfg, l) {
            if self.holds(&target, a)? {
                return Ok(Some(target));
            }
        }
        Ok(None)
    }

    /// P_may: some reachable `(σ', C')` with `C' ⊢σ' φ`. Sessions opened on
    /// the way may take any session name `φ` mentions.
    fn may(&mut self, cfg: &Configuration, a: &Formula) -> Result<Option<Configuration>, CheckError> {
        let mut sessions = BTreeSet::new();
        sessions.extend(
            a.free_names()
                .into_iter()
                .filter(|n| n.sort == NameSort::SessionChannel)
                .map(|n| n.ident),
        );
        let key = (cfg.clone(), sessions);
        let nodes = match self.reach.get(&key) {
            Some(r) => Rc::clone(r),
            None => {
                let r = Rc::new(reachable_with(cfg, None, &key.1)?);
                self.reach.insert(key, Rc::clone(&r));
                r
            }
        };
        for target in nodes.iter() {
            if self.holds(target, a)? {
                return Ok(Some(target.clone()));
            }
        }
        Ok(None)
    }

    /// P_∃: some witness `w` in the quantifier domain with `C ⊢σ φ[w/x]`.
    fn exists(&mut self, cfg: &Configuration, f: &Formula) -> Result<Option<(Witness, Formula)>, CheckError> {
        let Formula::Exists(b, body) = f else {
            return Ok(None);
        };
        for w in quantifier_domain(cfg, f, b.sort) {
            let inst = body.subst(b.sort, &b.var, &w);
            if self.holds(cfg, &inst)? {
                return Ok(Some((w, inst)));
            }
        }
        Ok(None)
    }

    /// Builds a derivation of a judgment already known to hold.
    fn derive(&mut self, cfg: &Configuration, f: &Formula) -> Result<Proof, CheckError> {
        Ok(match f {
            Formula::End => Proof::End,
            Formula::Eq(l, r) => Proof::Eq {
                value: equal_values(cfg, l, r).unwrap_or_else(missing),
            },
            Formula::And(a, b) => Proof::And {
                left: Box::new(self.derive(cfg, a)?),
                right: Box::new(self.derive(cfg, b)?),
            },
            Formula::Neg(_) => Proof::Neg,
            Formula::Par(a, b) => {
                let (left, right, lc, rc) = self.split(cfg, a, b)?.unwrap_or_else(missing);
                Proof::Par {
                    left,
                    right,
                    left_proof: Box::new(self.derive(&lc, a)?),
                    right_proof: Box::new(self.derive(&rc, b)?),
                }
            }
            Formula::Action(l, a) => {
                let target = self.action(cfg, l, a)?.unwrap_or_else(missing);
                let proof = Box::new(self.derive(&target, a)?);
                Proof::Action { target, proof }
            }
            Formula::May(a) => {
                let target = self.may(cfg, a)?.unwrap_or_else(missing);
                let proof = Box::new(self.derive(&target, a)?);
                Proof::May { target, proof }
            }
            Formula::Exists(..) => {
                let (witness, inst) = self.exists(cfg, f)?.unwrap_or_else(missing);
                Proof::Exists {
                    witness,
                    proof: Box::new(self.derive(cfg, &inst)?),
                }
            }
            sugar => self.derive(cfg, &expand_derived(sugar))?,
        })
    }
}

fn missing<T>() -> T {
    unreachable!("derive called on a judgment that does not hold")
}

/// The common value of both sides, if both evaluate and agree.
fn equal_values(cfg: &Configuration, l: &Located, r: &Located) -> Option<Value> {
    let v1 = eval_expr(&cfg.state, &l.expr, &l.at).ok()?;
    let v2 = eval_expr(&cfg.state, &r.expr, &r.at).ok()?;
    (v1 == v2).then_some(v1)
}

/// `C ⊢σ φ` without a derivation. Derived operators are expanded first.
pub fn entails(cfg: &Configuration, f: &Formula) -> Result<Verdict, CheckError> {
    Checker::new().entails(cfg, f)
}

/// Why a derivation failed to replay.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("proof does not replay at {rule}: {reason}")]
pub struct ReplayError {
    pub rule: &'static str,
    pub reason: String,
}

/// Re-checks a derivation produced by [`Checker::prove`] for `f`, using only
/// the semantic primitives (`Norm`, `Next`, `Reachable`, evaluation and the
/// quantifier domain). `Neg` leaves are re-decided.
pub fn replay(cfg: &Configuration, f: &Formula, proof: &Proof) -> Result<(), ReplayError> {
    if let Some(x) = cfg.chor.first_recursion() {
        return Err(ReplayError {
            rule: "start",
            reason: format!("`rec {x}` is not recursion-free"),
        });
    }
    replay_core(cfg, &expand_derived(f), proof)
}

fn replay_core(cfg: &Configuration, f: &Formula, proof: &Proof) -> Result<(), ReplayError> {
    let fail = |rule: &'static str, reason: String| Err(ReplayError { rule, reason });
    match (f, proof) {
        (Formula::End, Proof::End) => match norm(&cfg.chor) {
            Ok(p) if p.is_empty() => Ok(()),
            _ => fail("end", "the choreography has components left".into()),
        },
        (Formula::Eq(l, r), Proof::Eq { value }) => match equal_values(cfg, l, r) {
            Some(v) if &v == value => Ok(()),
            other => fail("eq", format!("sides evaluate to {other:?}, not {value}")),
        },
        (Formula::And(a, b), Proof::And { left, right }) => {
            replay_core(cfg, a, left)?;
            replay_core(cfg, b, right)
        }
        (Formula::Neg(a), Proof::Neg) => match Checker::new().holds(cfg, a) {
            Ok(false) => Ok(()),
            Ok(true) => fail("neg", "the negated formula holds".into()),
            Err(e) => fail("neg", e.to_string()),
        },
        (
            Formula::Par(a, b),
            Proof::Par {
                left,
                right,
                left_proof,
                right_proof,
            },
        ) => {
            let parts = norm(&cfg.chor).map_err(|e| ReplayError {
                rule: "par",
                reason: e.to_string(),
            })?;
            let mut all: Vec<usize> = left.iter().chain(right).copied().collect();
            all.sort_unstable();
            if all != (0..parts.len()).collect::<Vec<_>>() {
                return fail("par", "indices do not partition the components".into());
            }
            let side = |ix: &[usize]| {
                Configuration::new(cfg.state.clone(), Choreography::product(ix.iter().map(|&i| parts[i].clone())))
            };
            replay_core(&side(left), a, left_proof)?;
            replay_core(&side(right), b, right_proof)
        }
        (Formula::Action(l, a), Proof::Action { target, proof }) => {
            if !next(cfg, l).contains(target) {
                return fail("action", format!("{target} is not a {l} successor"));
            }
            replay_core(target, a, proof)
        }
        (Formula::May(a), Proof::May { target, proof }) => {
            let sessions: BTreeSet<Ident> = a
                .free_names()
                .into_iter()
                .filter(|n| n.sort == NameSort::SessionChannel)
                .map(|n| n.ident)
                .collect();
            match reachable_with(cfg, None, &sessions) {
                Ok(nodes) if nodes.contains(target) => replay_core(target, a, proof),
                _ => fail("may", format!("{target} is not reachable")),
            }
        }
        (Formula::Exists(b, body), Proof::Exists { witness, proof }) => {
            if !quantifier_domain(cfg, f, b.sort).contains(witness) {
                return fail("exists", format!("{witness} is outside the quantifier domain"));
            }
            replay_core(cfg, &body.subst(b.sort, &b.var, witness), proof)
        }
        _ => fail("shape", "proof node does not match the formula".into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_choreography, parse_formula, parse_state};

    fn check(state: &str, chor: &str, f: &str) -> bool {
        let cfg = Configuration::new(parse_state(state).unwrap(), parse_choreography(chor).unwrap());
        let f = parse_formula(f).unwrap();
        let v = Checker::new().prove(&cfg, &f).unwrap();
        if let Some(p) = &v.witness {
            replay(&cfg, &f, p).unwrap();
        }
        v.holds
    }

    #[test]
    fn inaction_entails_end() {
        assert!(check("", "0", "end"));
        assert!(!check("", "0", "~end"));
        assert!(check("", "0 | 0", "end"));
    }

    #[test]
    fn parallel_split() {
        let c = "A -> B : k<1, x>. 0 | C -> D : j<2, y>. 0";
        assert!(check("", c, "<com A->B k> end | <com C->D j> end"));
        assert!(check("", c, "end | (<com A->B k> true & <com C->D j> true)"));
        assert!(!check("", c, "end | end"));
        assert!(!check("", c, "<com A->B k> <com C->D j> end | end & false"));
    }

    #[test]
    fn init_binds_the_queried_session() {
        let c = "A -> B : a(k). A -> B : k<1, x>. 0";
        assert!(check("", c, "<init A->B a(s)> <com A->B s> x@B = 1@B"));
        assert!(!check("", c, "<init A->B a(s)> <com A->B k> true"));
        assert!(check("", c, "exists s:kchan . <init A->B a(s)> <com A->B s> end"));
    }

    #[test]
    fn may_and_box() {
        let c = "A -> B : k[+]{yes: A -> B : k<1, x>. 0, no: 0}";
        assert!(check("", c, "may x@B = 1@B"));
        assert!(!check("", c, "box ~end"));
        assert!(check("", c, "box (end \\/ <_> true)"));
    }

    #[test]
    fn equality_fails_on_unbound_or_mismatched_values() {
        assert!(!check("", "0", "x@A = x@A"));
        assert!(!check("x@A = 1", "0", "x@A = true@A"));
        assert!(check("x@A = 1", "0", "x@A = 1@B"));
    }

    #[test]
    fn recursion_is_rejected() {
        let cfg = Configuration::empty(parse_choreography("rec X { A -> B : k[+]{l: X} }").unwrap());
        assert_eq!(
            entails(&cfg, &Formula::End),
            Err(CheckError::RecursionNotSupported(Ident::from("X")))
        );
    }

    #[test]
    fn cancellation_is_observed() {
        let flag = Arc::new(AtomicBool::new(true));
        let cfg = Configuration::empty(Choreography::Inaction);
        let r = Checker::new().with_cancel(flag).entails(&cfg, &Formula::End);
        assert_eq!(r, Err(CheckError::Cancelled));
    }

    #[test]
    fn tampered_proofs_do_not_replay() {
        let cfg = Configuration::empty(parse_choreography("A -> B : k<1, x>. 0").unwrap());
        let f = parse_formula("<com A->B k> x@B = 1@B").unwrap();
        let v = Checker::new().prove(&cfg, &f).unwrap();
        let Some(Proof::Action { target, .. }) = v.witness else {
            panic!("expected an action proof")
        };
        let bad = Proof::Action {
            target,
            proof: Box::new(Proof::Eq { value: Value::Int(2) }),
        };
        assert!(replay(&cfg, &f, &bad).is_err());
        assert!(replay(&cfg, &f, &Proof::End).is_err());
    }
}
