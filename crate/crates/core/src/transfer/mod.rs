//! The S-expression transfer language and the make-myself encoding.

pub mod encode;
pub mod outcome;
pub mod sexpr;

pub use encode::{ast_to_transfer, transfer_to_ast, DecodeError};
pub use outcome::{Outcome, OutcomeKind};
pub use sexpr::{normalize_whitespace, parse_sexpr, parse_sexprs, serialize, SExpr, SExprError};
