//! Static checking of units.
//!
//! The decidable part (names, types, arities, well-foundedness) is
//! checked here and failures are [`TypeError`]s. Everything else
//! (invariants, restrictions, preconditions at calls, postconditions,
//! measures, theorems) becomes an [`Obligation`] for the oracle.

pub mod expr;
pub mod obligation;
pub mod toplevel;
pub mod wellfounded;

pub use expr::{Checker, RecursiveCall};
pub use obligation::{Obligation, Provenance};
pub use toplevel::{check_toplevel, register_instance, Checked, RESERVED_NAMES};
pub use wellfounded::{check_type_wellfounded, infer_witness};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypeErrorKind {
    DuplicateName,
    ReservedName,
    UnknownType,
    UnknownFunction,
    UnknownVariable,
    UnknownField,
    UnknownAlternative,
    Arity,
    TypeMismatch,
    NotWellFounded,
    WitnessNotFound,
    MeasureInferenceFailure,
}

impl TypeErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TypeErrorKind::DuplicateName => "duplicate-name",
            TypeErrorKind::ReservedName => "reserved-name",
            TypeErrorKind::UnknownType => "unknown-type",
            TypeErrorKind::UnknownFunction => "unknown-function",
            TypeErrorKind::UnknownVariable => "unknown-variable",
            TypeErrorKind::UnknownField => "unknown-field",
            TypeErrorKind::UnknownAlternative => "unknown-alternative",
            TypeErrorKind::Arity => "arity",
            TypeErrorKind::TypeMismatch => "type-mismatch",
            TypeErrorKind::NotWellFounded => "not-well-founded",
            TypeErrorKind::WitnessNotFound => "witness-not-found",
            TypeErrorKind::MeasureInferenceFailure => "measure-inference-failure",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}: {message}", kind.as_str())]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub message: String,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, message: impl Into<String>) -> Self {
        TypeError {
            kind,
            message: message.into(),
        }
    }
}
