//! Core to surface translation.
//!
//! Parameter types come from recognizer conjuncts of the guard on bare
//! parameters; the remaining non-typing conjuncts become the
//! precondition. Typing expressions elsewhere are true and disappear.

use crate::syntax::{
    BinaryOp, Expression, FunctionBody, FunctionDefinition, FunctionHeader, Identifier,
    LocalBinding, Quantifier, TypeExpr, TypedName, UnaryOp,
};
use crate::typecheck::Checker;
use crate::world::World;

use super::mangle::{builtin_surface_name, CoreName};
use super::term::{CoreDef, CoreTerm};
use super::IrError;

fn untranslatable(what: impl Into<String>) -> IrError {
    IrError::Untranslatable(what.into())
}

fn ident(s: &str) -> Result<Identifier, IrError> {
    Identifier::new(s).ok_or_else(|| untranslatable(format!("name {s}")))
}

/// A recognized type in a core application, if the head is a recognizer.
pub fn recognizer_type(t: &CoreTerm) -> Option<(TypeExpr, &CoreTerm)> {
    match t {
        CoreTerm::App(f, args) if args.len() == 1 => match CoreName::demangle(f)? {
            CoreName::Recognizer(ty) => Some((ty, &args[0])),
            _ => None,
        },
        _ => None,
    }
}

fn binary_op(name: &str) -> Option<BinaryOp> {
    Some(match name {
        "equal" => BinaryOp::Eq,
        "/=" => BinaryOp::Ne,
        "<" => BinaryOp::Lt,
        "<=" => BinaryOp::Le,
        ">" => BinaryOp::Gt,
        ">=" => BinaryOp::Ge,
        "+" => BinaryOp::Add,
        "-" => BinaryOp::Sub,
        "*" => BinaryOp::Mul,
        "div" => BinaryOp::Div,
        "rem" => BinaryOp::Rem,
        "implies" => BinaryOp::Implies,
        "implied" => BinaryOp::ImpliedBy,
        "iff" => BinaryOp::Iff,
        _ => return None,
    })
}

/// An expression, or a typing fact known to be true.
enum Back {
    Expr(Expression),
    True,
}

impl Back {
    fn expr(self) -> Expression {
        match self {
            Back::Expr(e) => e,
            Back::True => Expression::bool(true),
        }
    }
}

struct Backward<'w> {
    world: &'w World,
    ck: Checker<'w>,
}

impl<'w> Backward<'w> {
    fn exprs(&mut self, ts: &[CoreTerm]) -> Result<Vec<Expression>, IrError> {
        ts.iter().map(|t| Ok(self.term(t)?.expr())).collect()
    }

    fn fields(
        &mut self,
        decl: &[TypedName],
        args: &[CoreTerm],
    ) -> Result<Vec<(Identifier, Expression)>, IrError> {
        if decl.len() != args.len() {
            return Err(untranslatable("constructor arity"));
        }
        Ok(decl
            .iter()
            .map(|d| d.name.clone())
            .zip(self.exprs(args)?)
            .collect())
    }

    fn term(&mut self, t: &CoreTerm) -> Result<Back, IrError> {
        Ok(Back::Expr(match t {
            CoreTerm::Const(v) => v
                .to_literal()
                .ok_or_else(|| untranslatable(format!("constant {v}")))?,
            CoreTerm::Var(v) => Expression::Variable(ident(v)?),
            CoreTerm::Assume(_) => return Ok(Back::True),
            CoreTerm::Primitive => return Err(untranslatable("primitive")),
            CoreTerm::Quant { .. } => return Err(untranslatable("nested quantifier")),
            CoreTerm::If(c, a, b) => match self.term(c)? {
                Back::True => return self.term(a),
                Back::Expr(c) => Expression::cond(c, self.term(a)?.expr(), self.term(b)?.expr()),
            },
            CoreTerm::Let(bs, body) => {
                let mut locals = Vec::new();
                for b in bs {
                    let value = self.term(&b.value)?.expr();
                    let ty = match &b.ty {
                        Some(t) => t.clone(),
                        None => self.ck.infer(&value, None)?,
                    };
                    locals.push(LocalBinding {
                        name: ident(&b.name)?,
                        ty,
                        value,
                    });
                }
                let n = self.ck.env_len();
                for l in &locals {
                    self.ck.bind_type(l.name.clone(), l.ty.clone());
                }
                let body = self.term(body);
                self.ck.truncate_env(n);
                Expression::Bind {
                    locals,
                    body: Box::new(body?.expr()),
                }
            }
            CoreTerm::App(f, args) => return self.app(f, args),
        }))
    }

    fn app(&mut self, f: &str, args: &[CoreTerm]) -> Result<Back, IrError> {
        let name = CoreName::demangle(f).ok_or_else(|| untranslatable(f.to_string()))?;
        let e = match name {
            CoreName::Recognizer(_) => return Ok(Back::True),
            CoreName::Builtin(op) => match op.as_str() {
                "and" | "or" => {
                    let mut parts = Vec::new();
                    for a in args {
                        match self.term(a)? {
                            Back::True if op == "or" => return Ok(Back::True),
                            Back::True => {}
                            Back::Expr(e) => parts.push(e),
                        }
                    }
                    let bop = if op == "and" {
                        BinaryOp::And
                    } else {
                        BinaryOp::Or
                    };
                    let mut it = parts.into_iter();
                    match it.next() {
                        None if op == "and" => return Ok(Back::True),
                        None => Expression::bool(false),
                        Some(first) => it.fold(first, |acc, e| Expression::binary(bop, acc, e)),
                    }
                }
                "not" => match self.term(&args[0])? {
                    Back::True => Expression::bool(false),
                    Back::Expr(e) => Expression::not(e),
                },
                "unary--" => Expression::Unary(UnaryOp::Neg, Box::new(self.term(&args[0])?.expr())),
                "implies" => {
                    let l = self.term(&args[0])?;
                    let r = self.term(&args[1])?;
                    match (l, r) {
                        (_, Back::True) => return Ok(Back::True),
                        (Back::True, r) => return Ok(r),
                        (Back::Expr(l), Back::Expr(r)) => {
                            Expression::binary(BinaryOp::Implies, l, r)
                        }
                    }
                }
                "mv" => Expression::Tuple(self.exprs(args)?),
                "mv-nth" => {
                    let i = args[0]
                        .as_const()
                        .and_then(|v| v.as_int())
                        .and_then(num_traits::ToPrimitive::to_usize)
                        .ok_or_else(|| untranslatable("mv-nth index"))?;
                    Expression::TupleAccess(Box::new(self.term(&args[1])?.expr()), i)
                }
                "some" => Expression::Some(Box::new(self.term(&args[0])?.expr())),
                "none" => Expression::None,
                other => {
                    if let Some(bop) = binary_op(other) {
                        let l = self.term(&args[0])?.expr();
                        Expression::binary(bop, l, self.term(&args[1])?.expr())
                    } else {
                        let s = builtin_surface_name(other)
                            .ok_or_else(|| untranslatable(other.to_string()))?;
                        Expression::Call(Identifier::from(s), self.exprs(args)?)
                    }
                }
            },
            CoreName::User(g) => Expression::Call(g, self.exprs(args)?),
            CoreName::Constructor(ty) => {
                let decl = self
                    .world
                    .product_fields(&ty)
                    .ok_or_else(|| untranslatable(format!("type {ty}")))?
                    .to_vec();
                Expression::ProductConstruct {
                    fields: self.fields(&decl, args)?,
                    ty,
                }
            }
            CoreName::SumConstructor(ty, alt) => {
                let decl = self
                    .world
                    .alternative(&ty, &alt)
                    .ok_or_else(|| untranslatable(format!("{ty}::{alt}")))?
                    .fields
                    .clone();
                Expression::SumConstruct {
                    fields: self.fields(&decl, args)?,
                    ty,
                    alternative: alt,
                }
            }
            CoreName::Accessor(_, field) => {
                Expression::ProductAccess(Box::new(self.term(&args[0])?.expr()), field)
            }
            CoreName::Updater(_, field) => {
                let target = self.term(&args[0])?.expr();
                let value = self.term(&args[1])?.expr();
                match target {
                    Expression::ProductUpdate(inner, mut fields)
                        if !fields.iter().any(|(n, _)| *n == field) =>
                    {
                        fields.push((field, value));
                        Expression::ProductUpdate(inner, fields)
                    }
                    target => Expression::ProductUpdate(Box::new(target), vec![(field, value)]),
                }
            }
            CoreName::SumTest(_, alt) => {
                Expression::SumTest(Box::new(self.term(&args[0])?.expr()), alt)
            }
            CoreName::SumAccessor(_, alt, field) => {
                Expression::SumAccess(Box::new(self.term(&args[0])?.expr()), alt, field)
            }
            CoreName::Empty(t) => Expression::Empty(t),
        };
        Ok(Back::Expr(e))
    }
}

/// Translates a core term to a surface expression; variables have the
/// given types (used for untyped let bindings only).
pub fn from_core_expr(
    world: &World,
    env: &[(Identifier, TypeExpr)],
    t: &CoreTerm,
) -> Result<Expression, IrError> {
    let mut b = Backward {
        world,
        ck: Checker::typer(world),
    };
    for (n, ty) in env {
        b.ck.bind_type(n.clone(), ty.clone());
    }
    Ok(b.term(t)?.expr())
}

pub fn from_core_function(world: &World, def: &CoreDef) -> Result<FunctionDefinition, IrError> {
    let conjuncts = def.guard.conjuncts();
    let mut used = vec![false; conjuncts.len()];
    let mut inputs = Vec::new();
    for p in &def.params {
        let found = conjuncts
            .iter()
            .enumerate()
            .find_map(|(i, c)| match recognizer_type(c) {
                Some((ty, CoreTerm::Var(v))) if v == p && !used[i] => Some((i, ty)),
                _ => None,
            });
        let (i, ty) = found.ok_or_else(|| untranslatable(format!("no type for parameter {p}")))?;
        used[i] = true;
        inputs.push(TypedName {
            name: ident(p)?,
            ty,
        });
    }
    let env: Vec<(Identifier, TypeExpr)> = inputs
        .iter()
        .map(|p| (p.name.clone(), p.ty.clone()))
        .collect();
    let mut residual = Vec::new();
    for (i, c) in conjuncts.iter().enumerate() {
        if used[i] || recognizer_type(c).is_some() {
            continue;
        }
        let e = from_core_expr(world, &env, c)?;
        if e != Expression::bool(true) {
            residual.push(e);
        }
    }
    let precondition = (!residual.is_empty()).then(|| Expression::conjoin(residual));
    let mut outputs = Vec::new();
    for (n, r) in &def.returns {
        let ty = match CoreName::demangle(r) {
            Some(CoreName::Recognizer(t)) => t,
            _ => return Err(untranslatable(format!("result recognizer {r}"))),
        };
        outputs.push(TypedName {
            name: ident(n)?,
            ty,
        });
    }
    let body = match &def.inner {
        CoreTerm::Quant { forall, vars, body } => {
            let bound: Vec<TypedName> = vars
                .iter()
                .map(|(v, t)| {
                    Ok(TypedName {
                        name: ident(v)?,
                        ty: t.clone(),
                    })
                })
                .collect::<Result<_, IrError>>()?;
            let mut inner_env = env.clone();
            inner_env.extend(bound.iter().map(|b| (b.name.clone(), b.ty.clone())));
            FunctionBody::Quantified {
                quantifier: if *forall {
                    Quantifier::Forall
                } else {
                    Quantifier::Exists
                },
                bound,
                matrix: from_core_expr(world, &inner_env, body)?,
            }
        }
        inner => FunctionBody::Regular(from_core_expr(world, &env, inner)?),
    };
    let postcondition = match &def.postcondition {
        Some(p) => {
            let mut post_env = env.clone();
            post_env.extend(outputs.iter().map(|o| (o.name.clone(), o.ty.clone())));
            Some(from_core_expr(world, &post_env, p)?)
        }
        None => None,
    };
    Ok(FunctionDefinition {
        header: FunctionHeader {
            name: ident(&def.name)?,
            inputs,
            outputs,
        },
        precondition,
        postcondition,
        body,
    })
}
