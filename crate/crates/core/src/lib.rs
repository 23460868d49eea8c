pub mod ast;
pub mod checker;
pub mod pcp;
pub mod semantics;
pub mod syntax;
pub mod gen;
