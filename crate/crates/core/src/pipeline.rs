//! Processing of one unit against a world: check, test obligations,
//! commit. Transform invocations additionally derive, back-translate and
//! register the new definition.

use crate::eval::{test_obligation, OracleConfig, Status, Verdict};
use crate::ir::from_core_function;
use crate::syntax::{FunctionDefinition, TopLevel, TransformInvocation};
use crate::transfer::{Outcome, OutcomeKind};
use crate::transforms::{apply_transform, TransformResult};
use crate::typecheck::toplevel::check_functions;
use crate::typecheck::{check_toplevel, Obligation};
use crate::world::{FunctionEntry, Origin, World};

/// The result of processing one unit.
#[derive(Clone, Debug)]
pub struct UnitReport {
    pub outcome: Outcome,
    /// The extended world, when the unit was accepted.
    pub world: Option<World>,
    pub verdicts: Vec<(Obligation, Verdict)>,
}

impl UnitReport {
    pub fn accepted(&self) -> bool {
        self.world.is_some()
    }

    fn reject(message: String, verdicts: Vec<(Obligation, Verdict)>) -> UnitReport {
        UnitReport {
            outcome: Outcome::failure(message),
            world: None,
            verdicts,
        }
    }
}

/// A transformation applied but not yet committed.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub result: TransformResult,
    /// The new definition, back-translated.
    pub function: FunctionDefinition,
}

fn success_kind(unit: &TopLevel) -> OutcomeKind {
    match unit {
        TopLevel::Type(_) | TopLevel::TypeClique(_) => OutcomeKind::TypeSuccess,
        TopLevel::Function(_) | TopLevel::FunctionClique(_) => OutcomeKind::FunctionSuccess,
        TopLevel::Specification(_) => OutcomeKind::SpecificationSuccess,
        TopLevel::Theorem(_) => OutcomeKind::TheoremSuccess,
        TopLevel::Transform(_) => OutcomeKind::TransformationSuccess,
    }
}

fn names(unit: &TopLevel) -> String {
    unit.defined_names()
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Tests obligations in order; returns the verdicts and the first failure.
pub fn test_all(
    world: &World,
    obligations: Vec<Obligation>,
    config: &OracleConfig,
) -> (Vec<(Obligation, Verdict)>, Option<String>) {
    let mut out = Vec::new();
    for ob in obligations {
        let v = test_obligation(world, &ob, config);
        let failed = v.status == Status::Fail;
        let message = failed.then(|| format!("obligation failed: {ob}\n{}", v.summary()));
        out.push((ob, v));
        if failed {
            return (out, message);
        }
    }
    (out, None)
}

pub fn process_unit(world: &World, unit: &TopLevel, config: &OracleConfig) -> UnitReport {
    if let TopLevel::Transform(inv) = unit {
        return match derive(world, inv) {
            Ok(d) => commit(world, inv, d, config),
            Err(message) => UnitReport::reject(message, Vec::new()),
        };
    }
    let checked = match check_toplevel(world, unit) {
        Ok(c) => c,
        Err(e) => return UnitReport::reject(e.to_string(), Vec::new()),
    };
    let (verdicts, failure) = test_all(&checked.world, checked.obligations, config);
    if let Some(message) = failure {
        return UnitReport::reject(message, verdicts);
    }
    UnitReport {
        outcome: Outcome::success(success_kind(unit), names(unit)),
        world: Some(checked.world),
        verdicts,
    }
}

/// Applies a transformation and back-translates its result.
pub fn derive(world: &World, inv: &TransformInvocation) -> Result<Derivation, String> {
    let result = apply_transform(world, inv).map_err(|e| e.to_string())?;
    // the header first, so that calls in the body can be typed
    let mut stub = result.def.clone();
    stub.inner = stub.default.clone();
    let header = from_core_function(world, &stub).map_err(|e| e.to_string())?;
    let mut w = world.clone();
    w.functions.insert(
        header.name().clone(),
        FunctionEntry {
            def: header,
            clique: vec![inv.new_name.clone()],
            origin: derived_origin(inv),
            executable: true,
            measure: None,
        },
    );
    let function = from_core_function(&w, &result.def).map_err(|e| e.to_string())?;
    Ok(Derivation { result, function })
}

fn derived_origin(inv: &TransformInvocation) -> Origin {
    Origin::Derived {
        transform: inv.transform.to_string(),
        source: inv.target.clone(),
    }
}

/// Registers a derivation once its obligations pass.
pub fn commit(
    world: &World,
    inv: &TransformInvocation,
    d: Derivation,
    config: &OracleConfig,
) -> UnitReport {
    let unit = TopLevel::Function(d.function.clone());
    let checked = match check_functions(
        world,
        std::slice::from_ref(&d.function),
        &unit,
        derived_origin(inv),
    ) {
        Ok(c) => c,
        Err(e) => {
            return UnitReport::reject(format!("derived definition rejected: {e}"), Vec::new())
        }
    };
    let mut w = checked.world;
    let name = d.result.def.name.clone();
    w.core.insert(name, d.result.def);
    let (verdicts, failure) = test_all(&w, d.result.obligations, config);
    if let Some(message) = failure {
        return UnitReport::reject(message, verdicts);
    }
    w.rules.extend(d.result.rules);
    w.units.pop();
    w.units.push(TopLevel::Transform(inv.clone()));
    UnitReport {
        outcome: Outcome {
            kind: OutcomeKind::TransformationSuccess,
            message: inv.new_name.to_string(),
            payload: vec![unit],
        },
        world: Some(w),
        verdicts,
    }
}
