//! Random well-shaped ASTs, for round-trip properties. Names come from
//! small pools so that generated units look like real ones; nothing is
//! type-correct.

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::Rng;

use super::ast::*;

const VARS: [&str; 8] = ["x", "y", "n", "s", "acc", "p1", "edge0", "count_odd"];
const FUNS: [&str; 6] = ["f", "first", "rest", "path_p", "crossings_count_aux", "g2"];
const TYPES: [&str; 4] = ["point", "edge", "positive", "tree"];
const ALTS: [&str; 3] = ["leaf", "node", "empty_tree"];
const FIELDS: [&str; 4] = ["p1", "p2", "left", "value"];

fn pick<R: Rng>(rng: &mut R, pool: &[&str]) -> Identifier {
    Identifier::from(*pool.choose(rng).expect("non-empty pool"))
}

fn some_of<R: Rng, T>(rng: &mut R, lo: usize, hi: usize, mut f: impl FnMut(&mut R) -> T) -> Vec<T> {
    let n = rng.gen_range(lo..=hi);
    (0..n).map(|_| f(rng)).collect()
}

pub fn random_type<R: Rng>(rng: &mut R, depth: usize) -> TypeExpr {
    let leaf = depth == 0 || rng.gen_bool(0.5);
    if leaf {
        return match rng.gen_range(0..5) {
            0 => TypeExpr::Bool,
            1 => TypeExpr::Char,
            2 => TypeExpr::String,
            3 => TypeExpr::Int,
            _ => TypeExpr::Named(pick(rng, &TYPES)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 => TypeExpr::option(random_type(rng, d)),
        1 => TypeExpr::set(random_type(rng, d)),
        2 => TypeExpr::seq(random_type(rng, d)),
        3 => TypeExpr::map(random_type(rng, d), random_type(rng, d)),
        _ => TypeExpr::Tuple(some_of(rng, 2, 3, |r| random_type(r, d))),
    }
}

fn literal<R: Rng>(rng: &mut R) -> Literal {
    match rng.gen_range(0..5) {
        0 => Literal::Bool(rng.gen()),
        1 => Literal::Char(rng.gen_range(b' '..=b'~')),
        2 => Literal::String(
            (0..rng.gen_range(0..6))
                .map(|_| rng.gen_range(b' '..=b'~') as char)
                .collect(),
        ),
        3 => Literal::Int(BigInt::from(rng.gen_range(0u64..=u64::MAX)) * 1000u32),
        _ => Literal::Int(BigInt::from(rng.gen_range(0..100))),
    }
}

fn fields<R: Rng>(rng: &mut R, depth: usize) -> Vec<(Identifier, Expression)> {
    let mut names = FIELDS.to_vec();
    names.shuffle(rng);
    let n = rng.gen_range(1..=names.len());
    names[..n]
        .iter()
        .map(|f| (Identifier::from(*f), random_expression(rng, depth)))
        .collect()
}

pub fn random_expression<R: Rng>(rng: &mut R, depth: usize) -> Expression {
    if depth == 0 || rng.gen_ratio(1, 4) {
        return match rng.gen_range(0..6) {
            0 | 1 => Expression::Literal(literal(rng)),
            2 => Expression::None,
            3 => Expression::Empty(random_type(rng, 1)),
            _ => Expression::Variable(pick(rng, &VARS)),
        };
    }
    let d = depth - 1;
    let sub = |rng: &mut R| Box::new(random_expression(rng, d));
    match rng.gen_range(0..16) {
        0 => Expression::Unary(
            if rng.gen() {
                UnaryOp::Not
            } else {
                UnaryOp::Neg
            },
            sub(rng),
        ),
        1 | 2 => Expression::Binary(*BinaryOp::ALL.choose(rng).unwrap(), sub(rng), sub(rng)),
        3 => Expression::Conditional {
            test: sub(rng),
            then: sub(rng),
            otherwise: sub(rng),
        },
        4 | 5 => Expression::Call(
            pick(rng, &FUNS),
            some_of(rng, 0, 3, |r| random_expression(r, d)),
        ),
        6 => {
            let mut names = VARS.to_vec();
            names.shuffle(rng);
            let n = rng.gen_range(1..=2);
            Expression::Bind {
                locals: names[..n]
                    .iter()
                    .map(|v| LocalBinding {
                        name: Identifier::from(*v),
                        ty: random_type(rng, 1),
                        value: random_expression(rng, d),
                    })
                    .collect(),
                body: sub(rng),
            }
        }
        7 => Expression::Tuple(some_of(rng, 2, 3, |r| random_expression(r, d))),
        8 => Expression::TupleAccess(sub(rng), rng.gen_range(0..3)),
        9 => Expression::ProductConstruct {
            ty: pick(rng, &TYPES),
            fields: fields(rng, d),
        },
        10 => Expression::ProductAccess(sub(rng), pick(rng, &FIELDS)),
        11 => Expression::ProductUpdate(sub(rng), fields(rng, d)),
        12 => Expression::SumConstruct {
            ty: pick(rng, &TYPES),
            alternative: pick(rng, &ALTS),
            fields: fields(rng, d),
        },
        13 => Expression::SumTest(sub(rng), pick(rng, &ALTS)),
        14 => Expression::SumAccess(sub(rng), pick(rng, &ALTS), pick(rng, &FIELDS)),
        _ => Expression::Some(sub(rng)),
    }
}

fn typed_names<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> Vec<TypedName> {
    let mut names = VARS.to_vec();
    names.shuffle(rng);
    let n = rng.gen_range(lo..=hi);
    names[..n]
        .iter()
        .map(|v| TypedName {
            name: Identifier::from(*v),
            ty: random_type(rng, 2),
        })
        .collect()
}

fn header<R: Rng>(rng: &mut R, name: Identifier) -> FunctionHeader {
    FunctionHeader {
        name,
        inputs: typed_names(rng, 0, 3),
        outputs: typed_names(rng, 1, 2),
    }
}

fn maybe<R: Rng, T>(rng: &mut R, f: impl FnOnce(&mut R) -> T) -> Option<T> {
    if rng.gen() {
        Some(f(rng))
    } else {
        None
    }
}

fn quantifier<R: Rng>(rng: &mut R) -> Quantifier {
    if rng.gen() {
        Quantifier::Forall
    } else {
        Quantifier::Exists
    }
}

pub fn random_function<R: Rng>(rng: &mut R, name: Identifier) -> FunctionDefinition {
    let header = header(rng, name);
    let body = if rng.gen_ratio(1, 4) {
        FunctionBody::Quantified {
            quantifier: quantifier(rng),
            bound: typed_names(rng, 1, 2),
            matrix: random_expression(rng, 3),
        }
    } else {
        FunctionBody::Regular(random_expression(rng, 4))
    };
    FunctionDefinition {
        header,
        precondition: maybe(rng, |r| random_expression(r, 2)),
        postcondition: maybe(rng, |r| random_expression(r, 2)),
        body,
    }
}

pub fn random_typedef<R: Rng>(rng: &mut R, name: Identifier) -> TypeDefinition {
    let body = match rng.gen_range(0..3) {
        0 => TypeBody::Product {
            fields: typed_names(rng, 1, 3),
            invariant: maybe(rng, |r| random_expression(r, 2)),
        },
        1 => {
            let mut alts = ALTS.to_vec();
            alts.shuffle(rng);
            let n = rng.gen_range(1..=alts.len());
            TypeBody::Sum {
                alternatives: alts[..n]
                    .iter()
                    .map(|a| Alternative {
                        name: Identifier::from(*a),
                        fields: typed_names(rng, 0, 2),
                    })
                    .collect(),
            }
        }
        _ => TypeBody::Subtype {
            supertype: random_type(rng, 2),
            variable: pick(rng, &VARS),
            restriction: random_expression(rng, 3),
            witness: maybe(rng, |r| random_expression(r, 1)),
        },
    };
    TypeDefinition { name, body }
}

fn option_value<R: Rng>(rng: &mut R) -> OptionValue {
    match rng.gen_range(0..3) {
        0 => OptionValue::Identifier(pick(rng, &VARS)),
        1 => OptionValue::Bool(rng.gen()),
        // bare variables and booleans read back as their own option kinds
        _ => match random_expression(rng, 2) {
            Expression::Variable(v) => OptionValue::Identifier(v),
            Expression::Literal(Literal::Bool(b)) => OptionValue::Bool(b),
            e => OptionValue::Expression(e),
        },
    }
}

/// A random top-level unit.
pub fn random_toplevel<R: Rng>(rng: &mut R) -> TopLevel {
    let name = |rng: &mut R| pick(rng, &FUNS);
    match rng.gen_range(0..7) {
        0 => {
            let n = pick(rng, &TYPES);
            TopLevel::Type(random_typedef(rng, n))
        }
        1 => TopLevel::TypeClique(
            TYPES[..rng.gen_range(1..=2)]
                .iter()
                .map(|t| random_typedef(rng, Identifier::from(*t)))
                .collect(),
        ),
        2 => {
            let n = name(rng);
            TopLevel::Function(random_function(rng, n))
        }
        3 => TopLevel::FunctionClique(
            FUNS[..rng.gen_range(1..=2)]
                .iter()
                .map(|f| random_function(rng, Identifier::from(*f)))
                .collect(),
        ),
        4 => {
            let headers: Vec<_> = (0..rng.gen_range(1..=2))
                .map(|i| header(rng, Identifier::from(FUNS[i])))
                .collect();
            // the kind follows from the shape: one header is an io-relation
            let body = match (rng.gen_ratio(1, 3), headers.len()) {
                (true, _) => SpecBody::Quantified {
                    quantifier: quantifier(rng),
                    bound: typed_names(rng, 1, 2),
                    matrix: random_expression(rng, 3),
                },
                (false, 1) => SpecBody::IoRelation(random_expression(rng, 3)),
                (false, _) => SpecBody::Plain(random_expression(rng, 3)),
            };
            TopLevel::Specification(Specification {
                name: Identifier::from("spec1"),
                headers,
                body,
            })
        }
        5 => TopLevel::Theorem(Theorem {
            name: Identifier::from("thm1"),
            variables: typed_names(rng, 0, 3),
            formula: random_expression(rng, 4),
        }),
        _ => {
            let options = ["parameter", "new_parameter_name", "simplify", "expression"]
                [..rng.gen_range(0..=4)]
                .iter()
                .map(|o| (Identifier::from(*o), option_value(rng)))
                .collect();
            TopLevel::Transform(TransformInvocation {
                new_name: Identifier::from("f_1"),
                target: name(rng),
                transform: Identifier::from("isomorphism"),
                options,
            })
        }
    }
}
