//! Inhabitation of recursive type cliques, and subtype witnesses.

use std::collections::HashSet;

use crate::eval::{witness, Evaluator, Value};
use crate::syntax::{Identifier, TypeBody, TypeDefinition, TypeExpr};
use crate::world::World;

use super::{TypeError, TypeErrorKind};

fn inhabited(t: &TypeExpr, clique: &[Identifier], known: &HashSet<Identifier>) -> bool {
    match t {
        TypeExpr::Named(n) => !clique.contains(n) || known.contains(n),
        TypeExpr::Tuple(ts) => ts.iter().all(|t| inhabited(t, clique, known)),
        // options and collections are inhabited by their empty values
        _ => true,
    }
}

/// Least fixpoint: a clique type is inhabited once one of its shapes
/// needs only inhabited types. Types outside the clique are inhabited.
pub fn inhabited_types(defs: &[TypeDefinition]) -> HashSet<Identifier> {
    let clique: Vec<Identifier> = defs.iter().map(|d| d.name.clone()).collect();
    let mut known = HashSet::new();
    loop {
        let before = known.len();
        for d in defs {
            if known.contains(&d.name) {
                continue;
            }
            let ok = match &d.body {
                TypeBody::Product { fields, .. } => {
                    fields.iter().all(|f| inhabited(&f.ty, &clique, &known))
                }
                TypeBody::Sum { alternatives } => alternatives
                    .iter()
                    .any(|a| a.fields.iter().all(|f| inhabited(&f.ty, &clique, &known))),
                TypeBody::Subtype { supertype, .. } => inhabited(supertype, &clique, &known),
            };
            if ok {
                known.insert(d.name.clone());
            }
        }
        if known.len() == before {
            return known;
        }
    }
}

pub fn check_type_wellfounded(defs: &[TypeDefinition]) -> Result<(), TypeError> {
    let known = inhabited_types(defs);
    let empty: Vec<String> = defs
        .iter()
        .filter(|d| !known.contains(&d.name))
        .map(|d| d.name.to_string())
        .collect();
    if empty.is_empty() {
        Ok(())
    } else {
        Err(TypeError::new(
            TypeErrorKind::NotWellFounded,
            format!("no finite values of {}", empty.join(", ")),
        ))
    }
}

/// The first canonical candidate in the named type, if any.
pub fn infer_witness(world: &World, name: &Identifier) -> Option<Value> {
    let ev = Evaluator::new(world);
    witness(&ev, &TypeExpr::Named(name.clone())).ok().flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, TopLevel};

    fn defs(src: &str) -> Vec<TypeDefinition> {
        match parse_program(src).unwrap().remove(0) {
            TopLevel::Type(d) => vec![d],
            TopLevel::TypeClique(ds) => ds,
            _ => panic!(),
        }
    }

    #[test]
    fn tree_is_wellfounded() {
        assert!(
            check_type_wellfounded(&defs("variant tree { leaf, node(l: tree, r: tree) }")).is_ok()
        );
    }

    #[test]
    fn stream_is_not() {
        let e =
            check_type_wellfounded(&defs("struct stream { head: int, tail: stream }")).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::NotWellFounded);
    }

    #[test]
    fn mutual_clique_through_sequence_is_wellfounded() {
        let d = defs("types { struct a { bs: seq<b> } struct b { x: a } }");
        assert!(check_type_wellfounded(&d).is_ok());
    }
}
