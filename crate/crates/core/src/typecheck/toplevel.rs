//! Checking of top-level units other than transformations.

use crate::eval::{Evaluator, Value};
use crate::ir::forward::instance_recognizer;
use crate::ir::mangle::is_core_builtin;
use crate::ir::{infer_measure, to_core_function, to_core_type};
use crate::syntax::{
    BinaryOp, Expression, FunctionBody, FunctionDefinition, Identifier, Specification, Theorem,
    TopLevel, TypeBody, TypeDefinition, TypeExpr, TypedName,
};
use crate::world::{FunctionEntry, Origin, TypeEntry, World};

use super::wellfounded::{check_type_wellfounded, infer_witness};
use super::{Checker, Obligation, Provenance, TypeError, TypeErrorKind};

/// Names no unit may define: surface builtins, core operators that are
/// also identifiers, and type names the recognizer mangling uses.
pub const RESERVED_NAMES: &[&str] = &[
    "length",
    "first",
    "rest",
    "is_empty",
    "member",
    "add",
    "remove",
    "get",
    "put",
    "keys",
    "abs",
    "gcd",
    "max",
    "min",
    "prepend",
    "append",
    "concat",
    "len",
    "car",
    "cdr",
    "endp",
    "and",
    "or",
    "not",
    "implies",
    "implied",
    "iff",
    "equal",
    "div",
    "rem",
    "mv",
    "integer",
    "boolean",
    "character",
    "sequence",
    "option",
    "tuple",
];

/// A checked unit: the extended world and the obligations it must pass.
#[derive(Clone, Debug)]
pub struct Checked {
    pub world: World,
    pub obligations: Vec<Obligation>,
    /// Definitions a transformation produced.
    pub derived: Vec<TopLevel>,
}

fn err(kind: TypeErrorKind, message: impl Into<String>) -> TypeError {
    TypeError::new(kind, message)
}

/// Rejects names already defined, reserved, or repeated within `names`.
pub fn check_new_names(world: &World, names: &[&Identifier]) -> Result<(), TypeError> {
    for (i, n) in names.iter().enumerate() {
        if RESERVED_NAMES.contains(&n.as_str()) || is_core_builtin(n) {
            return Err(err(TypeErrorKind::ReservedName, format!("{n} is reserved")));
        }
        if world.is_defined(n) || names[..i].contains(n) {
            return Err(err(
                TypeErrorKind::DuplicateName,
                format!("{n} is already defined"),
            ));
        }
    }
    Ok(())
}

fn distinct(names: &[&Identifier], what: &str) -> Result<(), TypeError> {
    for (i, n) in names.iter().enumerate() {
        if names[..i].contains(n) {
            return Err(err(
                TypeErrorKind::DuplicateName,
                format!("{what} {n} repeated"),
            ));
        }
    }
    Ok(())
}

/// Registers a parameterized type and its components, components first.
pub fn register_instance(world: &mut World, t: &TypeExpr) {
    for c in t.children() {
        register_instance(world, c);
    }
    if t.is_parameterized() && !world.instances.contains(t) {
        world.instances.push(t.clone());
        let def = instance_recognizer(t);
        world.core.insert(def.name.clone(), def);
    }
}

pub fn check_toplevel(world: &World, unit: &TopLevel) -> Result<Checked, TypeError> {
    match unit {
        TopLevel::Type(d) => check_types(world, std::slice::from_ref(d), unit),
        TopLevel::TypeClique(ds) => check_types(world, ds, unit),
        TopLevel::Function(f) => {
            check_functions(world, std::slice::from_ref(f), unit, Origin::User)
        }
        TopLevel::FunctionClique(fs) => check_functions(world, fs, unit, Origin::User),
        TopLevel::Specification(s) => check_specification(world, s, unit),
        TopLevel::Theorem(t) => check_theorem(world, t, unit),
        TopLevel::Transform(t) => Err(err(
            TypeErrorKind::UnknownFunction,
            format!("transformation {} is not checked here", t.transform),
        )),
    }
}

fn supertype_cycle(world: &World, d: &TypeDefinition) -> bool {
    let mut t = TypeExpr::Named(d.name.clone());
    for _ in 0..=world.types.len() {
        match world.supertype(&t) {
            Some(s) => t = s.clone(),
            None => return false,
        }
    }
    true
}

fn check_types(
    world: &World,
    defs: &[TypeDefinition],
    unit: &TopLevel,
) -> Result<Checked, TypeError> {
    let names: Vec<&Identifier> = defs.iter().map(|d| &d.name).collect();
    check_new_names(world, &names)?;
    let mut w = world.clone();
    let clique: Vec<Identifier> = names.iter().map(|n| (*n).clone()).collect();
    for d in defs {
        w.types.insert(
            d.name.clone(),
            TypeEntry {
                def: d.clone(),
                clique: clique.clone(),
            },
        );
    }
    let probe = Checker::typer(&w);
    for d in defs {
        match &d.body {
            TypeBody::Product { fields, .. } => {
                distinct(&fields.iter().map(|f| &f.name).collect::<Vec<_>>(), "field")?;
                for f in fields {
                    probe.check_type_wellformed(&f.ty)?;
                }
            }
            TypeBody::Sum { alternatives } => {
                distinct(
                    &alternatives.iter().map(|a| &a.name).collect::<Vec<_>>(),
                    "alternative",
                )?;
                for a in alternatives {
                    distinct(
                        &a.fields.iter().map(|f| &f.name).collect::<Vec<_>>(),
                        "field",
                    )?;
                    for f in &a.fields {
                        probe.check_type_wellformed(&f.ty)?;
                    }
                }
            }
            TypeBody::Subtype { supertype, .. } => {
                probe.check_type_wellformed(supertype)?;
                if supertype_cycle(&w, d) {
                    return Err(err(
                        TypeErrorKind::NotWellFounded,
                        format!("{} is its own supertype", d.name),
                    ));
                }
            }
        }
    }
    check_type_wellfounded(defs)?;

    let mut obligations = Vec::new();
    for d in defs {
        match &d.body {
            TypeBody::Product {
                fields,
                invariant: Some(inv),
            } => {
                let mut ck = Checker::new(&w, d.name.clone());
                for f in fields {
                    ck.declare(f);
                }
                ck.check_bool(inv)?;
                obligations.append(&mut ck.obligations);
            }
            TypeBody::Subtype {
                supertype,
                variable,
                restriction,
                witness,
            } => {
                let mut ck = Checker::new(&w, d.name.clone());
                ck.declare(&TypedName {
                    name: variable.clone(),
                    ty: supertype.clone(),
                });
                ck.check_bool(restriction)?;
                obligations.append(&mut ck.obligations);
                if let Some(wexpr) = witness {
                    let mut ck = Checker::new(&w, d.name.clone());
                    ck.check_against(wexpr, supertype)?;
                    ck.emit_obligation(
                        Provenance::SubtypeWitness,
                        restriction.substitute(&[(variable.clone(), wexpr.clone())]),
                    );
                    obligations.append(&mut ck.obligations);
                    if let Ok(v) = Evaluator::new(&w).eval(wexpr, &Vec::new()) {
                        w.witnesses.insert(d.name.clone(), v);
                    }
                }
            }
            _ => {}
        }
    }
    for d in defs {
        if w.witnesses.contains_key(&d.name) {
            continue;
        }
        match infer_witness(&w, &d.name) {
            Some(v) => {
                w.witnesses.insert(d.name.clone(), v);
            }
            None if matches!(d.body, TypeBody::Subtype { .. }) => {
                return Err(err(
                    TypeErrorKind::WitnessNotFound,
                    format!("no candidate value satisfies the restriction of {}", d.name),
                ))
            }
            None => {}
        }
    }
    for d in defs {
        let mut parts: Vec<TypeExpr> = Vec::new();
        match &d.body {
            TypeBody::Product { fields, .. } => parts.extend(fields.iter().map(|f| f.ty.clone())),
            TypeBody::Sum { alternatives } => parts.extend(
                alternatives
                    .iter()
                    .flat_map(|a| a.fields.iter().map(|f| f.ty.clone())),
            ),
            TypeBody::Subtype { supertype, .. } => parts.push(supertype.clone()),
        }
        for t in &parts {
            register_instance(&mut w, t);
        }
        for c in to_core_type(&w, d).map_err(ir_type_error)? {
            w.core.insert(c.name.clone(), c);
        }
    }
    w.units.push(unit.clone());
    Ok(Checked {
        world: w,
        obligations,
        derived: Vec::new(),
    })
}

fn ir_type_error(e: crate::ir::IrError) -> TypeError {
    match e {
        crate::ir::IrError::Type(t) => t,
        other => err(TypeErrorKind::TypeMismatch, other.to_string()),
    }
}

fn called_user_functions(def: &FunctionDefinition) -> Vec<Identifier> {
    let mut out = Vec::new();
    match &def.body {
        FunctionBody::Regular(b) => b.called_functions(&mut out),
        FunctionBody::Quantified { matrix, .. } => matrix.called_functions(&mut out),
    }
    if let Some(p) = &def.precondition {
        p.called_functions(&mut out);
    }
    out
}

/// Checks a function or clique. Derived definitions are checked the same
/// way, but their obligations are left to the transformation.
pub fn check_functions(
    world: &World,
    defs: &[FunctionDefinition],
    unit: &TopLevel,
    origin: Origin,
) -> Result<Checked, TypeError> {
    let names: Vec<&Identifier> = defs.iter().map(|d| d.name()).collect();
    check_new_names(world, &names)?;
    let clique: Vec<Identifier> = names.iter().map(|n| (*n).clone()).collect();
    let probe = Checker::typer(world);
    for d in defs {
        let mut vars: Vec<&Identifier> = d.header.inputs.iter().map(|p| &p.name).collect();
        vars.extend(d.header.outputs.iter().map(|o| &o.name));
        distinct(&vars, "parameter")?;
        for p in d.header.inputs.iter().chain(&d.header.outputs) {
            probe.check_type_wellformed(&p.ty)?;
        }
        if let FunctionBody::Quantified { bound, .. } = &d.body {
            for b in bound {
                probe.check_type_wellformed(&b.ty)?;
            }
        }
    }
    let mut w = world.clone();
    for d in defs {
        w.functions.insert(
            d.name().clone(),
            FunctionEntry {
                def: d.clone(),
                clique: clique.clone(),
                origin: origin.clone(),
                executable: !d.is_quantified(),
                measure: None,
            },
        );
    }
    // measures first, so calls between clique members can use them
    let mut measures = Vec::new();
    for d in defs {
        let recursive = called_user_functions(d).iter().any(|f| clique.contains(f));
        let m = if recursive && !d.is_quantified() {
            match infer_measure(&w, d, &clique) {
                Some(m) => Some(m),
                // derived definitions terminate by construction
                None if matches!(origin, Origin::Derived { .. }) => None,
                None => {
                    return Err(err(
                        TypeErrorKind::MeasureInferenceFailure,
                        format!("no termination measure found for {}", d.name()),
                    ))
                }
            }
        } else {
            None
        };
        measures.push(m);
    }
    for (d, m) in defs.iter().zip(&measures) {
        w.functions.get_mut(d.name()).expect("inserted").measure = m.clone();
    }

    let mut obligations = Vec::new();
    for (d, measure) in defs.iter().zip(&measures) {
        let mut ck = Checker::new(&w, d.name().clone());
        ck.clique = clique.clone();
        for p in &d.header.inputs {
            ck.declare(p);
        }
        if let Some(pre) = &d.precondition {
            ck.check_bool(pre)?;
            ck.push_hypothesis(pre);
        }
        match &d.body {
            FunctionBody::Regular(b) => ck.check_against(b, &d.header.result_type())?,
            FunctionBody::Quantified { bound, matrix, .. } => {
                let n = ck.variables.len();
                for b in bound {
                    ck.declare(b);
                }
                ck.check_bool(matrix)?;
                ck.variables.truncate(n);
            }
        }
        if let Some(post) = &d.postcondition {
            let call = Expression::Call(
                d.name().clone(),
                d.header
                    .inputs
                    .iter()
                    .map(|p| Expression::Variable(p.name.clone()))
                    .collect(),
            );
            let many = d.header.outputs.len() > 1;
            for (i, o) in d.header.outputs.iter().enumerate() {
                ck.bind_type(o.name.clone(), o.ty.clone());
                let value = if many {
                    Expression::TupleAccess(Box::new(call.clone()), i)
                } else {
                    call.clone()
                };
                ck.bind_value(o.name.clone(), value);
            }
            let recorded = ck.recursive_calls.len();
            ck.check_bool(post)?;
            ck.recursive_calls.truncate(recorded);
            ck.emit_obligation(Provenance::Postcondition, post.clone());
        }
        if let Some(m) = measure {
            for rc in &ck.recursive_calls {
                let callee = defs
                    .iter()
                    .position(|g| g.name() == &rc.callee)
                    .expect("clique member");
                let Some(mc) = &measures[callee] else {
                    continue;
                };
                let map: Vec<(Identifier, Expression)> = defs[callee]
                    .header
                    .inputs
                    .iter()
                    .map(|p| p.name.clone())
                    .zip(rc.args.iter().cloned())
                    .collect();
                let smaller = mc.substitute(&map);
                let conclusion = Expression::binary(
                    BinaryOp::And,
                    Expression::binary(BinaryOp::Le, Expression::int(0), smaller.clone()),
                    Expression::binary(BinaryOp::Lt, smaller, m.clone()),
                );
                ck.obligations.push(Obligation {
                    provenance: Provenance::MeasureDecrease,
                    source: d.name().clone(),
                    variables: d.header.inputs.clone(),
                    hypotheses: rc.hypotheses.clone(),
                    conclusion,
                });
            }
        }
        obligations.append(&mut ck.obligations);
    }

    // executable: no quantifier reachable through calls
    loop {
        let mut changed = false;
        for d in defs {
            if !w.functions[d.name()].executable {
                continue;
            }
            let blocked = called_user_functions(d)
                .iter()
                .any(|f| w.functions.get(f).is_some_and(|e| !e.executable));
            if blocked {
                w.functions.get_mut(d.name()).expect("inserted").executable = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    for d in defs {
        for p in d.header.inputs.iter().chain(&d.header.outputs) {
            register_instance(&mut w, &p.ty);
        }
    }
    for d in defs {
        let core = to_core_function(&w, d).map_err(ir_type_error)?;
        w.core.insert(core.name.clone(), core);
    }
    w.units.push(unit.clone());
    Ok(Checked {
        world: w,
        obligations,
        derived: Vec::new(),
    })
}

fn check_specification(
    world: &World,
    s: &Specification,
    unit: &TopLevel,
) -> Result<Checked, TypeError> {
    check_new_names(world, &[&s.name])?;
    distinct(
        &s.headers.iter().map(|h| &h.name).collect::<Vec<_>>(),
        "function variable",
    )?;
    let mut ck = Checker::typer(world);
    for h in &s.headers {
        for p in h.inputs.iter().chain(&h.outputs) {
            ck.check_type_wellformed(&p.ty)?;
        }
    }
    ck.headers = s.headers.clone();
    match &s.body {
        crate::syntax::SpecBody::Plain(e) => ck.check_bool(e)?,
        crate::syntax::SpecBody::Quantified { bound, matrix, .. } => {
            for b in bound {
                ck.check_type_wellformed(&b.ty)?;
                ck.bind_type(b.name.clone(), b.ty.clone());
            }
            ck.check_bool(matrix)?;
        }
        crate::syntax::SpecBody::IoRelation(e) => {
            let h = &s.headers[0];
            for p in h.inputs.iter().chain(&h.outputs) {
                ck.bind_type(p.name.clone(), p.ty.clone());
            }
            ck.check_bool(e)?;
        }
    }
    let mut w = world.clone();
    w.specifications.insert(s.name.clone(), s.clone());
    w.units.push(unit.clone());
    Ok(Checked {
        world: w,
        obligations: Vec::new(),
        derived: Vec::new(),
    })
}

fn check_theorem(world: &World, t: &Theorem, unit: &TopLevel) -> Result<Checked, TypeError> {
    check_new_names(world, &[&t.name])?;
    distinct(
        &t.variables.iter().map(|v| &v.name).collect::<Vec<_>>(),
        "variable",
    )?;
    let mut ck = Checker::new(world, t.name.clone());
    for v in &t.variables {
        ck.check_type_wellformed(&v.ty)?;
        ck.declare(v);
    }
    let mut formula = &t.formula;
    while let Expression::Binary(BinaryOp::Implies, h, c) = formula {
        ck.check_bool(h)?;
        ck.push_hypothesis(h);
        formula = c;
    }
    ck.check_bool(formula)?;
    ck.emit_obligation(Provenance::Theorem, formula.clone());
    let mut w = world.clone();
    w.theorems.insert(t.name.clone(), t.clone());
    let rules = crate::transforms::theorem_rules(&w, t);
    w.rules.extend(rules);
    w.units.push(unit.clone());
    Ok(Checked {
        world: w,
        obligations: ck.obligations,
        derived: Vec::new(),
    })
}

/// Evaluates a closed expression in a world, for witnesses and tests.
pub fn evaluate_closed(world: &World, e: &Expression) -> Option<Value> {
    Evaluator::new(world).eval(e, &Vec::new()).ok()
}
