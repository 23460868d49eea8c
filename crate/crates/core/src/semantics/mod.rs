//! Operational semantics: expression evaluation, the labelled transition
//! system over configurations `(σ, C)`, normalisation and reachability.

mod eval;
mod explore;
mod norm;
mod step;

pub use eval::{eval_expr, EvalError};
pub use explore::{explore, reachable, reachable_with, Exploration};
pub use norm::{norm, normal_form, struct_equiv, SemanticsError};
pub use step::{
    guard_diagnostics, next, step, step_with, Configuration, GuardDiagnostic, StateWrite, TraceEntry, Transition,
    FRESH_SESSION_BASE,
};
