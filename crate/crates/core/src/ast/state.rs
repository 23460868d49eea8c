use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::expr::Value;
use super::ident::Ident;

/// The store σ: values indexed by variable *and* participant, so
/// `x@A` and `x@B` are independent cells.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    cells: BTreeMap<(Ident, Ident), Value>,
}

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn get(&self, var: &Ident, at: &Ident) -> Option<&Value> {
        self.cells.get(&(var.clone(), at.clone()))
    }

    /// Returns the previous value, if any.
    pub fn insert(&mut self, var: Ident, at: Ident, v: Value) -> Option<Value> {
        self.cells.insert((var, at), v)
    }

    /// Persistent update `σ[x@B ↦ v]`.
    pub fn with(&self, var: Ident, at: Ident, v: Value) -> State {
        let mut s = self.clone();
        s.insert(var, at, v);
        s
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Ident, &Value)> {
        self.cells.iter().map(|((x, p), v)| (x, p, v))
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.cells.values()
    }

    /// Cells whose value differs between `self` and `next` (or that are new).
    pub fn delta(&self, next: &State) -> Vec<(Ident, Ident, Value)> {
        next.cells
            .iter()
            .filter(|(k, v)| self.cells.get(*k) != Some(*v))
            .map(|((x, p), v)| (x.clone(), p.clone(), v.clone()))
            .collect()
    }
}

impl<const N: usize> From<[(&str, &str, Value); N]> for State {
    fn from(items: [(&str, &str, Value); N]) -> Self {
        let mut s = State::new();
        for (x, p, v) in items {
            s.insert(x.into(), p.into(), v);
        }
        s
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (x, p, v)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}@{p} = {v}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct Cell<'a> {
    var: &'a Ident,
    at: &'a Ident,
    value: &'a Value,
}

impl Serialize for State {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (var, at, value) in self.iter() {
            seq.serialize_element(&Cell { var, at, value })?;
        }
        seq.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn located_cells_are_independent() {
        let s = State::from([("x", "A", Value::Int(3)), ("x", "B", Value::Int(4))]);
        assert_eq!(s.get(&"x".into(), &"A".into()), Some(&Value::Int(3)));
        assert_eq!(s.get(&"x".into(), &"B".into()), Some(&Value::Int(4)));
        assert_eq!(s.get(&"x".into(), &"C".into()), None);
    }

    #[test]
    fn delta_reports_changed_cells() {
        let s = State::from([("x", "A", Value::Int(3))]);
        let t = s.with("y".into(), "B".into(), Value::Int(5));
        assert_eq!(t.delta(&t), vec![]);
        assert_eq!(s.delta(&t), vec![("y".into(), "B".into(), Value::Int(5))]);
    }
}
