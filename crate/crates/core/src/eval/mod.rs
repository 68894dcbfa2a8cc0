//! Evaluation of executable definitions and randomized obligation testing.

pub mod builtins;
pub mod interp;
pub mod oracle;
pub mod random;
pub mod value;

pub use interp::{Env, EvalConfig, Evaluator, DEFAULT_MAX_DEPTH, HAS_TYPE};
pub use oracle::{
    check_spec, holds_at, test_obligation, OracleConfig, Status, Verdict, DEFAULT_SEED,
    DEFAULT_SIZE, DEFAULT_TRIALS, DISCARD_RATIO,
};
pub use random::{candidates, random_value, witness, Sampler};
pub use value::Value;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("guard violation: {guard} ({detail})")]
    GuardViolation { guard: String, detail: String },
    #[error("{0} is not executable")]
    NonExecutable(String),
    #[error("recursion depth exceeded {0}")]
    DepthExceeded(usize),
    #[error("unknown {0}")]
    Unknown(String),
    #[error("dynamic type error: {0}")]
    Type(String),
    #[error("no value of type {0} found")]
    Exhausted(String),
}
