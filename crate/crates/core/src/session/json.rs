//! JSON views of cells and outcomes, shared by the HTTP facade and the
//! CLI report.

use serde::Serialize;

use super::state::{Cell, CellStatus};
use crate::eval::Status;
use crate::syntax::print_toplevel;
use crate::transfer::{serialize, Outcome};

/// Version of every JSON document produced here.
pub const JSON_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct OutcomeJson {
    pub kind: &'static str,
    pub success: bool,
    pub message: String,
    /// The outcome form in canonical transfer-language text.
    pub transfer: String,
    /// Derived definitions as surface source.
    pub functions: Vec<String>,
}

impl From<&Outcome> for OutcomeJson {
    fn from(o: &Outcome) -> Self {
        OutcomeJson {
            kind: o.kind.name(),
            success: o.is_success(),
            message: o.message.clone(),
            transfer: serialize(&o.to_sexpr()).unwrap_or_default(),
            functions: o.payload.iter().map(print_toplevel).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObligationJson {
    pub provenance: &'static str,
    pub formula: String,
    pub status: Status,
    pub satisfied: usize,
    pub attempts: usize,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellJson {
    pub index: usize,
    pub status: CellStatus,
    pub source: String,
    pub outcome: Option<OutcomeJson>,
    pub obligations: Vec<ObligationJson>,
}

impl CellJson {
    pub fn new(index: usize, c: &Cell) -> CellJson {
        CellJson {
            index,
            status: c.status,
            source: c.source.clone(),
            outcome: c.outcome.as_ref().map(OutcomeJson::from),
            obligations: c
                .verdicts
                .iter()
                .map(|(ob, v)| ObligationJson {
                    provenance: ob.provenance.as_str(),
                    formula: ob.to_string(),
                    status: v.status,
                    satisfied: v.satisfied,
                    attempts: v.attempts,
                    counterexample: v.counterexample.as_ref().map(|ce| {
                        ce.iter()
                            .map(|(n, v)| format!("{n} = {v}"))
                            .collect::<Vec<_>>()
                            .join(", ")
                    }),
                })
                .collect(),
        }
    }
}
