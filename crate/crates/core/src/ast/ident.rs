use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

/// An identifier. Cheap to clone; compared by string content.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(s: impl AsRef<str>) -> Self {
        Ident(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// The identifier with any `#n` freshness suffix removed.
    pub fn base(&self) -> &str {
        match self.0.find('#') {
            Some(i) if i > 0 => &self.0[..i],
            _ => &self.0,
        }
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident(Arc::from(s))
    }
}

impl Serialize for Ident {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

/// Participants (`A`, `B`, `AC'`, ...).
pub type Participant = Ident;

/// The namespace a [`Name`] lives in. Sorts are disjoint: `x` the variable
/// and `x` the branch label are different names.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NameSort {
    Participant,
    SharedChannel,
    SessionChannel,
    BranchLabel,
    Variable,
    ProcessVariable,
}

impl fmt::Display for NameSort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NameSort::Participant => "participant",
            NameSort::SharedChannel => "shared channel",
            NameSort::SessionChannel => "session channel",
            NameSort::BranchLabel => "label",
            NameSort::Variable => "variable",
            NameSort::ProcessVariable => "process variable",
        };
        f.write_str(s)
    }
}

/// A sorted name. Two names are equal iff identifier and sort agree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Name {
    pub sort: NameSort,
    pub ident: Ident,
}

impl Name {
    pub fn new(sort: NameSort, ident: impl Into<Ident>) -> Self {
        Name { sort, ident: ident.into() }
    }

    pub fn participant(s: &str) -> Self {
        Name::new(NameSort::Participant, s)
    }

    pub fn shared(s: &str) -> Self {
        Name::new(NameSort::SharedChannel, s)
    }

    pub fn session(s: &str) -> Self {
        Name::new(NameSort::SessionChannel, s)
    }

    pub fn label(s: &str) -> Self {
        Name::new(NameSort::BranchLabel, s)
    }

    pub fn variable(s: &str) -> Self {
        Name::new(NameSort::Variable, s)
    }

    pub fn process_var(s: &str) -> Self {
        Name::new(NameSort::ProcessVariable, s)
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ident)
    }
}

/// Picks `base#n` for the smallest `n >= 1` that `taken` rejects.
pub fn fresh_ident(base: &str, mut taken: impl FnMut(&str) -> bool) -> Ident {
    let mut n = 1usize;
    loop {
        let candidate = format!("{base}#{n}");
        if !taken(&candidate) {
            return Ident::from(candidate);
        }
        n += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_are_disjoint() {
        assert_ne!(Name::variable("x"), Name::label("x"));
        assert_eq!(Name::variable("x"), Name::variable("x"));
    }

    #[test]
    fn identifiers_are_case_sensitive() {
        assert_ne!(Ident::from("a"), Ident::from("A"));
    }

    #[test]
    fn base_strips_fresh_suffix() {
        assert_eq!(Ident::from("k1#3").base(), "k1");
        assert_eq!(Ident::from("k").base(), "k");
    }

    #[test]
    fn fresh_skips_taken() {
        let f = fresh_ident("k", |s| s == "k#1" || s == "k#2");
        assert_eq!(f.as_str(), "k#3");
    }
}
