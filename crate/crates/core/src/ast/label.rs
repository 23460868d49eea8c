use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::ident::{Ident, Name, NameSort};

/// Transition labels of the LTS, and the labels of the logic's modalities.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ActionLabel {
    /// `init(A, B, a(k))`
    Init {
        from: Ident,
        to: Ident,
        service: Ident,
        session: Ident,
    },
    /// `com(A, B, k)`
    Com { from: Ident, to: Ident, session: Ident },
    /// `branch(A, B, k, l)`
    Branch {
        from: Ident,
        to: Ident,
        session: Ident,
        label: Ident,
    },
}

impl ActionLabel {
    pub fn init(from: &str, to: &str, service: &str, session: &str) -> Self {
        ActionLabel::Init {
            from: from.into(),
            to: to.into(),
            service: service.into(),
            session: session.into(),
        }
    }

    pub fn com(from: &str, to: &str, session: &str) -> Self {
        ActionLabel::Com {
            from: from.into(),
            to: to.into(),
            session: session.into(),
        }
    }

    pub fn branch(from: &str, to: &str, session: &str, label: &str) -> Self {
        ActionLabel::Branch {
            from: from.into(),
            to: to.into(),
            session: session.into(),
            label: label.into(),
        }
    }

    pub fn from(&self) -> &Ident {
        match self {
            ActionLabel::Init { from, .. }
            | ActionLabel::Com { from, .. }
            | ActionLabel::Branch { from, .. } => from,
        }
    }

    pub fn to(&self) -> &Ident {
        match self {
            ActionLabel::Init { to, .. } | ActionLabel::Com { to, .. } | ActionLabel::Branch { to, .. } => to,
        }
    }

    pub fn session(&self) -> &Ident {
        match self {
            ActionLabel::Init { session, .. }
            | ActionLabel::Com { session, .. }
            | ActionLabel::Branch { session, .. } => session,
        }
    }

    pub fn collect_names(&self, out: &mut BTreeSet<Name>) {
        out.insert(Name::new(NameSort::Participant, self.from().clone()));
        out.insert(Name::new(NameSort::Participant, self.to().clone()));
        out.insert(Name::new(NameSort::SessionChannel, self.session().clone()));
        match self {
            ActionLabel::Init { service, .. } => {
                out.insert(Name::new(NameSort::SharedChannel, service.clone()));
            }
            ActionLabel::Branch { label, .. } => {
                out.insert(Name::new(NameSort::BranchLabel, label.clone()));
            }
            ActionLabel::Com { .. } => {}
        }
    }

    /// Rename every component of the given sort.
    pub fn rename(&self, sort: NameSort, old: &Ident, new: &Ident) -> ActionLabel {
        let r = |id: &Ident, s: NameSort| {
            if s == sort && id == old {
                new.clone()
            } else {
                id.clone()
            }
        };
        use NameSort::*;
        match self {
            ActionLabel::Init { from, to, service, session } => ActionLabel::Init {
                from: r(from, Participant),
                to: r(to, Participant),
                service: r(service, SharedChannel),
                session: r(session, SessionChannel),
            },
            ActionLabel::Com { from, to, session } => ActionLabel::Com {
                from: r(from, Participant),
                to: r(to, Participant),
                session: r(session, SessionChannel),
            },
            ActionLabel::Branch { from, to, session, label } => ActionLabel::Branch {
                from: r(from, Participant),
                to: r(to, Participant),
                session: r(session, SessionChannel),
                label: r(label, BranchLabel),
            },
        }
    }
}

impl fmt::Display for ActionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ActionLabel::Init { from, to, service, session } => {
                write!(f, "init({from}, {to}, {service}({session}))")
            }
            ActionLabel::Com { from, to, session } => write!(f, "com({from}, {to}, {session})"),
            ActionLabel::Branch { from, to, session, label } => {
                write!(f, "branch({from}, {to}, {session}, {label})")
            }
        }
    }
}
