//! Proof obligations: formulas the type checker cannot decide.

use std::fmt;

use serde::Serialize;

use crate::syntax::{print_expression, Expression, Identifier, TypedName};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ProductInvariant,
    SubtypeRestriction,
    SubtypeWitness,
    PreconditionAtCall,
    Postcondition,
    MeasureDecrease,
    TransformCorrectness,
    IsomorphismInversion,
    Theorem,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::ProductInvariant => "product-invariant",
            Provenance::SubtypeRestriction => "subtype-restriction",
            Provenance::SubtypeWitness => "subtype-witness",
            Provenance::PreconditionAtCall => "precondition-at-call",
            Provenance::Postcondition => "postcondition",
            Provenance::MeasureDecrease => "measure-decrease",
            Provenance::TransformCorrectness => "transform-correctness",
            Provenance::IsomorphismInversion => "isomorphism-inversion",
            Provenance::Theorem => "theorem",
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `forall variables. hypotheses ==> conclusion`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obligation {
    pub provenance: Provenance,
    /// The unit that gave rise to the obligation.
    pub source: Identifier,
    pub variables: Vec<TypedName>,
    pub hypotheses: Vec<Expression>,
    pub conclusion: Expression,
}

impl Obligation {
    /// The obligation as a single formula.
    pub fn formula(&self) -> String {
        let mut out = String::new();
        if !self.variables.is_empty() {
            let vars: Vec<String> = self
                .variables
                .iter()
                .map(|v| format!("{}: {}", v.name, v.ty))
                .collect();
            out.push_str(&format!("forall({}) ", vars.join(", ")));
        }
        for h in &self.hypotheses {
            out.push_str(&format!("({}) ==> ", print_expression(h)));
        }
        out.push_str(&print_expression(&self.conclusion));
        out
    }
}

impl fmt::Display for Obligation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: {}",
            self.provenance,
            self.source,
            self.formula()
        )
    }
}
