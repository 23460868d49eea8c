//! Domain types of the Global Calculus and its logic.

mod chor;
mod expr;
mod formula;
mod ident;
mod label;
mod session_type;
mod state;

pub use chor::{AstError, Choreography};
pub use expr::{BinOp, Expr, Value};
pub use formula::{Binder, Formula, Located, QuantSort, Witness};
pub use ident::{fresh_ident, Ident, Name, NameSort, Participant};
pub use label::ActionLabel;
pub use session_type::{SessionType, ValueType};
pub use state::State;
