//! Syntheto: a typed functional surface language whose definitions are
//! refined by named, obligation-checked transformations over a core IR.
//!
//! Pipeline: [`syntax`] parses units, [`typecheck`] validates them and emits
//! [`Obligation`]s, [`eval`] tests obligations by random sampling, [`ir`]
//! translates to and from the core IR, [`transforms`] derives new
//! definitions, [`transfer`] encodes everything as S-expressions and
//! [`session`] drives notebooks over a socket bridge and HTTP.

pub mod eval;
pub mod ir;
pub mod pipeline;
pub mod session;
pub mod syntax;
pub mod transfer;
pub mod transforms;
pub mod typecheck;
pub mod world;

pub use typecheck::Obligation;

pub use syntax::{
    alpha_equal, parse_program, print_toplevel, Expression, Identifier, TopLevel, TypeExpr,
};
