//! The core IR: an untyped, prover-style term language.
//!
//! Every surface function becomes a [`CoreDef`] whose body reads
//! `(if (assume guard) inner default)`, where the guard conjoins parameter
//! recognizers with the precondition. Types become recognizers,
//! constructors, accessors and updaters with mangled names.

pub mod backward;
pub mod eval;
pub mod forward;
pub mod mangle;
pub mod measure;
pub mod term;

pub use backward::{from_core_expr, from_core_function};
pub use eval::CoreEvaluator;
pub use forward::{to_core_expr, to_core_function, to_core_type};
pub use mangle::CoreName;
pub use measure::infer_measure;
pub use term::{CoreBinding, CoreDef, CoreOrigin, CoreTerm};

use crate::typecheck::TypeError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum IrError {
    #[error("cannot translate: {0}")]
    Untranslatable(String),
    #[error(transparent)]
    Type(#[from] TypeError),
}
