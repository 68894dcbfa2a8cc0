//! Termination measures for recursive definitions.
//!
//! Two patterns are recognized, parameter by parameter:
//! a collection parameter that every recursive call shrinks with `rest`
//! or `remove` gets measure `length(p)`; an integer parameter that every
//! call decreases by a positive constant, with a lower bound `b` in the
//! precondition or its subtype, gets measure `p - b`.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::syntax::{
    BinaryOp, Expression, FunctionDefinition, Identifier, Literal, TypeBody, TypeExpr,
};
use crate::world::World;

fn recursive_calls<'a>(e: &'a Expression, clique: &[Identifier], out: &mut Vec<&'a [Expression]>) {
    if let Expression::Call(f, args) = e {
        if clique.contains(f) {
            out.push(args);
        }
    }
    for c in e.children() {
        recursive_calls(c, clique, out);
    }
}

fn is_var(e: &Expression, p: &Identifier) -> bool {
    matches!(e, Expression::Variable(v) if v == p)
}

fn shrinks(e: &Expression, p: &Identifier) -> bool {
    match e {
        Expression::Call(f, args) if f.as_str() == "rest" && args.len() == 1 => {
            is_var(&args[0], p) || shrinks(&args[0], p)
        }
        Expression::Call(f, args) if f.as_str() == "remove" && args.len() == 2 => {
            is_var(&args[0], p)
        }
        _ => false,
    }
}

fn int_literal(e: &Expression) -> Option<&BigInt> {
    match e {
        Expression::Literal(Literal::Int(n)) => Some(n),
        _ => None,
    }
}

fn decrements(e: &Expression, p: &Identifier) -> bool {
    match e {
        Expression::Binary(BinaryOp::Sub, l, r) => {
            is_var(l, p) && int_literal(r).is_some_and(|c| c.is_positive())
        }
        Expression::Binary(BinaryOp::Add, l, r) => {
            is_var(l, p) && int_literal(r).is_some_and(|c| c.is_negative())
        }
        _ => false,
    }
}

/// A constant `b` with `p >= b` implied by the conjunct.
fn lower_bound(c: &Expression, p: &Identifier) -> Option<BigInt> {
    let Expression::Binary(op, l, r) = c else {
        return None;
    };
    match op {
        BinaryOp::Ge if is_var(l, p) => int_literal(r).cloned(),
        BinaryOp::Gt if is_var(l, p) => int_literal(r).map(|b| b + 1),
        BinaryOp::Le if is_var(r, p) => int_literal(l).cloned(),
        BinaryOp::Lt if is_var(r, p) => int_literal(l).map(|b| b + 1),
        _ => None,
    }
}

fn subtype_lower_bound(world: &World, t: &TypeExpr) -> Option<BigInt> {
    let TypeExpr::Named(n) = t else { return None };
    match &world.type_def(n)?.body {
        TypeBody::Subtype {
            supertype,
            variable,
            restriction,
            ..
        } => restriction
            .conjuncts()
            .into_iter()
            .find_map(|c| lower_bound(c, variable))
            .or_else(|| subtype_lower_bound(world, supertype)),
        _ => None,
    }
}

/// The measure of a recursive function as an expression over its
/// parameters, or `None` when no pattern applies.
pub fn infer_measure(
    world: &World,
    def: &FunctionDefinition,
    clique: &[Identifier],
) -> Option<Expression> {
    let body = def.regular_body()?;
    let mut calls = Vec::new();
    recursive_calls(body, clique, &mut calls);
    if calls.is_empty() {
        return None;
    }
    for (i, p) in def.header.inputs.iter().enumerate() {
        let args: Option<Vec<&Expression>> = calls.iter().map(|c| c.get(i)).collect();
        let Some(args) = args else { continue };
        match world.root(&p.ty) {
            TypeExpr::Seq(_) | TypeExpr::Set(_) | TypeExpr::Map(_, _) | TypeExpr::String => {
                if args.iter().all(|a| shrinks(a, &p.name)) {
                    return Some(Expression::call(
                        "length",
                        vec![Expression::Variable(p.name.clone())],
                    ));
                }
            }
            TypeExpr::Int => {
                if !args.iter().all(|a| decrements(a, &p.name)) {
                    continue;
                }
                let bound = def
                    .precondition
                    .iter()
                    .flat_map(|pre| pre.conjuncts())
                    .find_map(|c| lower_bound(c, &p.name))
                    .or_else(|| subtype_lower_bound(world, &p.ty));
                let Some(b) = bound else { continue };
                let v = Expression::Variable(p.name.clone());
                return Some(if b.is_zero() {
                    v
                } else if b.is_negative() {
                    Expression::binary(BinaryOp::Add, v, Expression::Literal(Literal::Int(-b)))
                } else {
                    Expression::binary(BinaryOp::Sub, v, Expression::Literal(Literal::Int(b)))
                });
            }
            _ => {}
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, TopLevel};

    fn measure(src: &str) -> Option<String> {
        let TopLevel::Function(f) = parse_program(src).unwrap().remove(0) else {
            panic!()
        };
        let clique = vec![f.name().clone()];
        infer_measure(&World::new(), &f, &clique).map(|e| e.to_string())
    }

    #[test]
    fn factorial_measure_is_n() {
        let m = measure(
            "function factorial(n: int) assumes n >= 0 returns (out: int) {
               if (n == 0) { return 1; } else { return n * factorial(n - 1); } }",
        );
        assert_eq!(m.as_deref(), Some("n"));
    }

    #[test]
    fn sequence_measure_is_length() {
        let m = measure(
            "function count(s: seq<int>) returns (n: int) {
               if (is_empty(s)) { return 0; } else { return 1 + count(rest(s)); } }",
        );
        assert_eq!(m.as_deref(), Some("length(s)"));
    }

    #[test]
    fn unbounded_countdown_fails() {
        let m = measure(
            "function down(n: int) returns (r: int) {
               if (n == 0) { return 0; } else { return down(n - 1); } }",
        );
        assert_eq!(m, None);
    }

    #[test]
    fn shifted_lower_bound() {
        let m = measure(
            "function down(n: int) assumes n > 2 returns (r: int) {
               if (n == 3) { return 0; } else { return down(n - 1); } }",
        );
        assert_eq!(m.as_deref(), Some("n - 3"));
    }
}
