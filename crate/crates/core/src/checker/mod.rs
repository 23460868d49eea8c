//! Satisfaction of global-logic formulae by recursion-free configurations:
//! the proof system (with memoisation and optional derivations), the
//! expansion of derived operators, and an independent semantic oracle.

mod domain;
mod entails;
mod expand;
mod naive;

pub use domain::quantifier_domain;
pub use entails::{entails, replay, CheckError, Checker, Proof, ReplayError, Verdict};
pub use expand::expand_derived;
pub use naive::satisfies_naive;
