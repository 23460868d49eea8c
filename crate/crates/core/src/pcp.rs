//! The reduction of the Post Correspondence Problem to satisfiability of
//! `◇(str1@A = str2@A ∧ str1@A ≠ ε ∧ str2@A ≠ ε)` on recursive
//! choreographies, and a bounded search for solutions.
//!
//! `A1 … An` repeatedly tell `B` an index `i` (stored in `r@B`); `A`
//! repeatedly opens a session with `B`, ships `str1`/`str2` over, and `B`
//! sends them back extended with the `r@B`-th pair.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::ast::{ActionLabel, BinOp, Choreography, Expr, Formula, Ident, Located, State, Value};
use crate::semantics::{eval_expr, normal_form, step, Configuration, TraceEntry};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PcpError {
    #[error("a PCP instance needs at least one pair")]
    Empty,
    #[error("pair {index}: `{word}` is not a word over {{0, 1}}")]
    BadSymbol { index: usize, word: String },
    #[error("malformed pair `{0}`: expected `s:t`")]
    Malformed(String),
}

/// A nonempty list of word pairs over `{0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcpInstance {
    pairs: Vec<(String, String)>,
}

impl PcpInstance {
    pub fn new<S: Into<String>>(pairs: impl IntoIterator<Item = (S, S)>) -> Result<Self, PcpError> {
        let pairs: Vec<(String, String)> = pairs.into_iter().map(|(s, t)| (s.into(), t.into())).collect();
        if pairs.is_empty() {
            return Err(PcpError::Empty);
        }
        for (i, (s, t)) in pairs.iter().enumerate() {
            for w in [s, t] {
                if !w.chars().all(|c| c == '0' || c == '1') {
                    return Err(PcpError::BadSymbol {
                        index: i + 1,
                        word: w.clone(),
                    });
                }
            }
        }
        Ok(PcpInstance { pairs })
    }

    /// Parses `s1:t1,s2:t2,...`.
    pub fn parse(text: &str) -> Result<Self, PcpError> {
        let pairs = text
            .split(',')
            .map(|p| {
                let p = p.trim();
                p.split_once(':')
                    .map(|(s, t)| (s.trim().to_string(), t.trim().to_string()))
                    .ok_or_else(|| PcpError::Malformed(p.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        PcpInstance::new(pairs)
    }

    pub fn pairs(&self) -> &[(String, String)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for PcpInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs.iter().map(|(s, t)| format!("{s}:{t}")).collect();
        f.write_str(&parts.join(","))
    }
}

fn var(x: &str) -> Expr {
    Expr::var(x)
}

/// `Random(A1, …, An, B, a)`: one looping initiator per index.
fn random(n: usize) -> Choreography {
    Choreography::product((1..=n).map(|i| {
        let ai = format!("A{i}");
        Choreography::rec(
            "X",
            Choreography::init(
                &ai,
                "B",
                "a",
                "k",
                Choreography::com(&ai, "B", "k", Expr::int(i as i64), "r", Choreography::recvar("X")),
            ),
        )
    }))
}

/// `Append(A, B, b)` for the given pairs.
fn append(pairs: &[(String, String)]) -> Choreography {
    let extend = |(s, t): &(String, String)| {
        Choreography::com(
            "B",
            "A",
            "k",
            Expr::bin(BinOp::Concat, var("tmp1"), Expr::str(s)),
            "str1",
            Choreography::com(
                "B",
                "A",
                "k",
                Expr::bin(BinOp::Concat, var("tmp2"), Expr::str(t)),
                "str2",
                Choreography::recvar("X"),
            ),
        )
    };
    let cascade = pairs.iter().enumerate().rev().fold(Choreography::recvar("X"), |els, (i, p)| {
        let guard = Expr::bin(BinOp::Eq, Expr::located("r", "B"), Expr::int(i as i64 + 1));
        Choreography::cond(guard, "B", extend(p), els)
    });
    Choreography::rec(
        "X",
        Choreography::init(
            "A",
            "B",
            "b",
            "k",
            Choreography::com(
                "A",
                "B",
                "k",
                var("str1"),
                "tmp1",
                Choreography::com("A", "B", "k", var("str2"), "tmp2", cascade),
            ),
        ),
    )
}

/// The initial configuration `(σ, Random(A1, …, An, B, a) | Append(A, B, b))`.
pub fn encode_pcp(inst: &PcpInstance) -> Configuration {
    let state = State::from([
        ("str1", "A", Value::str("")),
        ("str2", "A", Value::str("")),
        ("tmp1", "B", Value::str("")),
        ("tmp2", "B", Value::str("")),
        ("r", "B", Value::Int(1)),
    ]);
    Configuration::new(state, Choreography::par(random(inst.len()), append(&inst.pairs)))
}

fn eps_at_a() -> Located {
    Located::new(Expr::str(""), "A")
}

/// `str1@A = str2@A ∧ str1@A ≠ ε ∧ str2@A ≠ ε`
pub fn goal_body() -> Formula {
    Formula::and(
        Formula::and(
            Formula::eq(Located::var("str1", "A"), Located::var("str2", "A")),
            Formula::neg(Formula::eq(Located::var("str1", "A"), eps_at_a())),
        ),
        Formula::neg(Formula::eq(Located::var("str2", "A"), eps_at_a())),
    )
}

/// `◇(str1@A = str2@A ∧ str1@A ≠ ε ∧ str2@A ≠ ε)`
pub fn pcp_formula() -> Formula {
    Formula::may(goal_body())
}

fn word(s: &State, x: &str) -> Option<String> {
    match eval_expr(s, &Expr::var(x), &Ident::from("A")) {
        Ok(Value::Str(w)) => Some(w),
        _ => None,
    }
}

/// Whether a state satisfies the body of the goal.
pub fn goal_reached(s: &State) -> bool {
    matches!((word(s, "str1"), word(s, "str2")), (Some(a), Some(b)) if a == b && !a.is_empty())
}

/// A path to a configuration satisfying the goal.
#[derive(Debug, Clone, PartialEq)]
pub struct PcpSolution {
    /// Number of transitions taken.
    pub depth: usize,
    pub trace: Vec<TraceEntry>,
    /// Indices (1-based) of the pairs appended, in order.
    pub sequence: Vec<usize>,
    pub str1: String,
    pub str2: String,
    pub end: Configuration,
}

impl PcpSolution {
    /// Whether the index sequence really solves the instance. The goal can
    /// also hold between the two replies of a round, when `str1` already
    /// carries `s_i` but `str2` does not yet carry `t_i`; such a trace
    /// satisfies the formula without being a PCP solution.
    pub fn solves(&self, inst: &PcpInstance) -> bool {
        let pick = |which: fn(&(String, String)) -> &String| -> Option<String> {
            self.sequence
                .iter()
                .map(|&i| inst.pairs.get(i.checked_sub(1)?).map(which).cloned())
                .collect()
        };
        match (pick(|p| &p.0), pick(|p| &p.1)) {
            (Some(s), Some(t)) => !s.is_empty() && s == t && s == self.str1 && t == self.str2,
            _ => false,
        }
    }
}

/// A visited configuration, how it was reached (parent and label), and its depth.
type Node = (Configuration, Option<(usize, ActionLabel)>, usize);

/// Outcome of a bounded search.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub solution: Option<PcpSolution>,
    /// Distinct configurations (up to congruence) visited.
    pub explored: usize,
}

/// Breadth-first search for the goal within `depth` transitions. Successors
/// are visited in label order, so the solution returned is the
/// lexicographically least trace among the shortest ones. Finding nothing
/// says nothing about longer traces.
pub fn bounded_search(inst: &PcpInstance, depth: usize) -> Option<PcpSolution> {
    search(inst, depth).solution
}

pub fn search(inst: &PcpInstance, depth: usize) -> SearchReport {
    search_observed(inst, depth, &AtomicU64::new(0))
}

/// [`search`], publishing the number of configurations visited so far into
/// `progress`.
pub fn search_observed(inst: &PcpInstance, depth: usize, progress: &AtomicU64) -> SearchReport {
    let start = encode_pcp(inst);
    let mut nodes: Vec<Node> = vec![(start.clone(), None, 0)];
    let mut seen: HashMap<(Choreography, State), usize> = HashMap::new();
    seen.insert((normal_form(&start.chor), start.state.clone()), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        progress.store(nodes.len() as u64, Ordering::Relaxed);
        if goal_reached(&nodes[i].0.state) {
            return SearchReport {
                solution: Some(rebuild(&nodes, i)),
                explored: nodes.len(),
            };
        }
        let d = nodes[i].2;
        if d >= depth {
            continue;
        }
        let mut ts = step(&nodes[i].0);
        ts.sort_by(|a, b| a.label.cmp(&b.label));
        for t in ts {
            let key = (normal_form(&t.target.chor), t.target.state.clone());
            if seen.contains_key(&key) {
                continue;
            }
            seen.insert(key, nodes.len());
            queue.push_back(nodes.len());
            nodes.push((t.target, Some((i, t.label)), d + 1));
        }
    }
    SearchReport {
        solution: None,
        explored: nodes.len(),
    }
}

fn rebuild(nodes: &[Node], goal: usize) -> PcpSolution {
    let mut path = vec![goal];
    while let Some((parent, _)) = &nodes[*path.last().unwrap()].1 {
        path.push(*parent);
    }
    path.reverse();
    let (b, a) = (Ident::from("B"), Ident::from("A"));
    let mut trace = Vec::new();
    let mut sequence = Vec::new();
    // B only ever talks back to A to hand over the extended words, str1
    // first and str2 second; r@B at the first of the two picked the pair.
    let mut replies = 0usize;
    for w in path.windows(2) {
        let (before, after) = (&nodes[w[0]].0, &nodes[w[1]]);
        let label = after.1.as_ref().map(|(_, l)| l.clone()).unwrap();
        let entry = TraceEntry {
            label: label.clone(),
            delta: before
                .state
                .delta(&after.0.state)
                .into_iter()
                .map(|(var, at, value)| crate::semantics::StateWrite { var, at, value })
                .collect(),
        };
        if matches!(label, ActionLabel::Com { .. }) && label.from() == &b && label.to() == &a {
            if replies.is_multiple_of(2) {
                if let Some(Value::Int(i)) = before.state.get(&Ident::from("r"), &b) {
                    sequence.push(*i as usize);
                }
            }
            replies += 1;
        }
        trace.push(entry);
    }
    let end = nodes[goal].0.clone();
    PcpSolution {
        depth: trace.len(),
        trace,
        sequence,
        str1: word(&end.state, "str1").unwrap_or_default(),
        str2: word(&end.state, "str2").unwrap_or_default(),
        end,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Name;
    use crate::syntax::{parse_formula, print_formula};

    #[test]
    fn instances_are_validated() {
        assert_eq!(PcpInstance::new(Vec::<(String, String)>::new()), Err(PcpError::Empty));
        assert!(matches!(PcpInstance::parse("0:2"), Err(PcpError::BadSymbol { index: 1, .. })));
        assert!(matches!(PcpInstance::parse("01"), Err(PcpError::Malformed(_))));
        let inst = PcpInstance::parse("0:0, 01:1").unwrap();
        assert_eq!(inst.len(), 2);
        assert_eq!(inst.to_string(), "0:0,01:1");
    }

    #[test]
    fn encoding_shape() {
        let cfg = encode_pcp(&PcpInstance::parse("0:0").unwrap());
        assert!(!cfg.chor.is_recursion_free());
        assert_eq!(cfg.state.len(), 5);
        let names = cfg.chor.free_names();
        for n in [
            Name::participant("A"),
            Name::participant("B"),
            Name::shared("a"),
            Name::shared("b"),
            Name::variable("str1"),
            Name::variable("str2"),
            Name::variable("tmp1"),
            Name::variable("tmp2"),
            Name::variable("r"),
        ] {
            assert!(names.contains(&n), "missing {n}");
        }
    }

    #[test]
    fn formula_round_trips_and_is_core() {
        let f = pcp_formula();
        assert_eq!(parse_formula(&print_formula(&f)).unwrap(), f);
        assert!(crate::checker::expand_derived(&f).is_core());
        assert_eq!(
            parse_formula("may ( str1@A = str2@A & ~(str1@A = eps) & ~(str2@A = eps) )").unwrap(),
            f
        );
    }

    #[test]
    fn goal_body_on_equal_words() {
        let s = State::from([("str1", "A", Value::str("0")), ("str2", "A", Value::str("0"))]);
        let cfg = Configuration::new(s.clone(), Choreography::Inaction);
        assert!(goal_reached(&s));
        assert!(crate::checker::entails(&cfg, &goal_body()).unwrap().holds);
    }

    #[test]
    fn the_goal_can_hold_mid_round() {
        // After one round str1 = 1, str2 = 11; the second round's first
        // reply makes str1 = 11 before str2 is extended.
        let inst = PcpInstance::parse("1:11").unwrap();
        let sol = bounded_search(&inst, 20).unwrap();
        assert_eq!(sol.depth, 9);
        assert_eq!(sol.sequence, vec![1, 1]);
        assert_eq!((sol.str1.as_str(), sol.str2.as_str()), ("11", "11"));
        assert!(!sol.solves(&inst));
        let sol = bounded_search(&PcpInstance::parse("0:0").unwrap(), 10).unwrap();
        assert!(sol.solves(&PcpInstance::parse("0:0").unwrap()));
    }

    #[test]
    fn depth_zero_finds_nothing() {
        assert!(bounded_search(&PcpInstance::parse("0:0").unwrap(), 0).is_none());
    }
}
