use std::collections::{BTreeSet, HashMap, VecDeque};

use super::norm::{normal_form, SemanticsError};
use super::step::{step_with, Configuration, Transition};
use crate::ast::{ActionLabel, Choreography, Ident, State};

/// The part of the labelled transition system reachable from a configuration.
#[derive(Debug, Clone, Default)]
pub struct Exploration {
    /// Representatives of reachable configurations, in breadth-first order;
    /// `nodes[0]` is the start.
    pub nodes: Vec<Configuration>,
    /// BFS depth of each node.
    pub depth: Vec<usize>,
    /// `(source, label, target)` indices into `nodes`.
    pub edges: Vec<(usize, ActionLabel, usize)>,
    /// True if the budget cut off some configuration that could still move.
    pub truncated: bool,
}

type Key = (Choreography, State);

fn key(cfg: &Configuration) -> Key {
    (normal_form(&cfg.chor), cfg.state.clone())
}

/// Breadth-first exploration. Configurations are identified up to
/// structural congruence (monoid laws and alpha) and state equality. With a
/// budget, nothing more than `budget` steps from the start is expanded.
pub fn explore(
    cfg: &Configuration,
    budget: Option<usize>,
    sessions: &BTreeSet<Ident>,
) -> Result<Exploration, SemanticsError> {
    if budget.is_none() {
        if let Some(x) = cfg.chor.first_recursion() {
            return Err(SemanticsError::RecursionWithoutBudget(x.clone()));
        }
    }
    let mut ex = Exploration::default();
    let mut index: HashMap<Key, usize> = HashMap::new();
    index.insert(key(cfg), 0);
    ex.nodes.push(cfg.clone());
    ex.depth.push(0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let d = ex.depth[i];
        let transitions: Vec<Transition> = step_with(&ex.nodes[i], sessions);
        if budget.is_some_and(|b| d >= b) {
            if !transitions.is_empty() {
                ex.truncated = true;
            }
            continue;
        }
        for t in transitions {
            let k = key(&t.target);
            let j = match index.get(&k) {
                Some(&j) => j,
                None => {
                    let j = ex.nodes.len();
                    index.insert(k, j);
                    ex.nodes.push(t.target);
                    ex.depth.push(d + 1);
                    queue.push_back(j);
                    j
                }
            };
            ex.edges.push((i, t.label, j));
        }
    }
    Ok(ex)
}

/// `Reachable(σ, C)`: every configuration reachable in zero or more steps,
/// up to structural congruence. Requires a budget for recursive terms.
pub fn reachable(cfg: &Configuration, budget: Option<usize>) -> Result<Vec<Configuration>, SemanticsError> {
    reachable_with(cfg, budget, &BTreeSet::new())
}

/// [`reachable`] where `init` steps may also open sessions named in `sessions`
/// (see [`step_with`]).
pub fn reachable_with(
    cfg: &Configuration,
    budget: Option<usize>,
    sessions: &BTreeSet<Ident>,
) -> Result<Vec<Configuration>, SemanticsError> {
    Ok(explore(cfg, budget, sessions)?.nodes)
}
