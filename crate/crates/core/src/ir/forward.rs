//! Surface to core translation.

use crate::eval::{candidates, Evaluator, Value, HAS_TYPE};
use crate::syntax::{
    BinaryOp, Expression, FunctionBody, FunctionDefinition, Identifier, Literal, Quantifier,
    TypeBody, TypeDefinition, TypeExpr, UnaryOp,
};
use crate::typecheck::Checker;
use crate::world::World;

use super::mangle::{builtin_core_name, recognizer_name, CoreName};
use super::term::{CoreBinding, CoreDef, CoreOrigin, CoreTerm};
use super::IrError;

pub fn binary_core_name(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::Eq => "equal",
        BinaryOp::Ne => "/=",
        BinaryOp::Lt => "<",
        BinaryOp::Le => "<=",
        BinaryOp::Gt => ">",
        BinaryOp::Ge => ">=",
        BinaryOp::Add => "+",
        BinaryOp::Sub => "-",
        BinaryOp::Mul => "*",
        BinaryOp::Div => "div",
        BinaryOp::Rem => "rem",
        BinaryOp::And => "and",
        BinaryOp::Or => "or",
        BinaryOp::Implies => "implies",
        BinaryOp::ImpliedBy => "implied",
        BinaryOp::Iff => "iff",
    }
}

pub fn recognize(t: &TypeExpr, x: CoreTerm) -> CoreTerm {
    CoreTerm::App(recognizer_name(t), vec![x])
}

struct Forward<'w> {
    ck: Checker<'w>,
}

impl<'w> Forward<'w> {
    fn type_name(&mut self, e: &Expression, product: bool) -> Result<Identifier, IrError> {
        let t = self.ck.infer(e, None)?;
        let world = self.ck.world;
        let name = if product {
            world.product_of(&t).map(|(n, _, _)| n.clone())
        } else {
            world.sum_of(&t).map(|(n, _)| n.clone())
        };
        name.ok_or_else(|| IrError::Untranslatable(format!("no type for `{e}`")))
    }

    fn exprs(&mut self, es: &[Expression]) -> Result<Vec<CoreTerm>, IrError> {
        es.iter().map(|e| self.expr(e)).collect()
    }

    fn ordered(
        &mut self,
        decl: &[crate::syntax::TypedName],
        given: &[(Identifier, Expression)],
    ) -> Result<Vec<CoreTerm>, IrError> {
        decl.iter()
            .map(|d| {
                let (_, e) = given
                    .iter()
                    .find(|(n, _)| n == &d.name)
                    .ok_or_else(|| IrError::Untranslatable(format!("missing field {}", d.name)))?;
                self.expr(e)
            })
            .collect()
    }

    fn expr(&mut self, e: &Expression) -> Result<CoreTerm, IrError> {
        Ok(match e {
            Expression::Literal(l) => CoreTerm::Const(match l {
                Literal::Bool(b) => Value::Bool(*b),
                Literal::Char(c) => Value::Char(*c),
                Literal::String(s) => Value::String(s.clone()),
                Literal::Int(n) => Value::Int(n.clone()),
            }),
            Expression::Variable(v) => CoreTerm::Var(v.to_string()),
            Expression::Unary(op, a) => {
                let f = match op {
                    UnaryOp::Not => "not",
                    UnaryOp::Neg => "unary--",
                };
                CoreTerm::app(f, vec![self.expr(a)?])
            }
            Expression::Binary(op, l, r) => {
                CoreTerm::app(binary_core_name(*op), vec![self.expr(l)?, self.expr(r)?])
            }
            Expression::Conditional {
                test,
                then,
                otherwise,
            } => CoreTerm::ite(self.expr(test)?, self.expr(then)?, self.expr(otherwise)?),
            Expression::Call(f, args) => {
                let args = self.exprs(args)?;
                if let Some(ty) = f.strip_prefix(HAS_TYPE) {
                    let t = crate::syntax::parse_type(ty)
                        .map_err(|_| IrError::Untranslatable(format!("type {ty}")))?;
                    return Ok(CoreTerm::App(recognizer_name(&t), args));
                }
                match builtin_core_name(f) {
                    Some(core) => CoreTerm::app(core, args),
                    None => CoreTerm::App(f.to_string(), args),
                }
            }
            Expression::Bind { locals, body } => {
                let mut bs = Vec::new();
                for l in locals {
                    bs.push(CoreBinding {
                        name: l.name.to_string(),
                        ty: Some(l.ty.clone()),
                        value: self.expr(&l.value)?,
                    });
                }
                let n = self.ck.env_len();
                for l in locals {
                    self.ck.bind_type(l.name.clone(), l.ty.clone());
                }
                let body = self.expr(body);
                self.ck.truncate_env(n);
                CoreTerm::Let(bs, Box::new(body?))
            }
            Expression::Tuple(es) => CoreTerm::app("mv", self.exprs(es)?),
            Expression::TupleAccess(t, i) => {
                CoreTerm::app("mv-nth", vec![CoreTerm::int(*i as i64), self.expr(t)?])
            }
            Expression::ProductConstruct { ty, fields } => {
                let decl = self
                    .ck
                    .world
                    .product_fields(ty)
                    .ok_or_else(|| IrError::Untranslatable(format!("type {ty}")))?
                    .to_vec();
                CoreTerm::App(
                    CoreName::Constructor(ty.clone()).mangle(),
                    self.ordered(&decl, fields)?,
                )
            }
            Expression::ProductAccess(p, f) => {
                let t = self.type_name(p, true)?;
                CoreTerm::App(
                    CoreName::Accessor(t, f.clone()).mangle(),
                    vec![self.expr(p)?],
                )
            }
            Expression::ProductUpdate(p, fields) => {
                let t = self.type_name(p, true)?;
                let mut acc = self.expr(p)?;
                for (f, v) in fields {
                    acc = CoreTerm::App(
                        CoreName::Updater(t.clone(), f.clone()).mangle(),
                        vec![acc, self.expr(v)?],
                    );
                }
                acc
            }
            Expression::SumConstruct {
                ty,
                alternative,
                fields,
            } => {
                let alt = self
                    .ck
                    .world
                    .alternative(ty, alternative)
                    .ok_or_else(|| IrError::Untranslatable(format!("{ty}::{alternative}")))?
                    .clone();
                CoreTerm::App(
                    CoreName::SumConstructor(ty.clone(), alternative.clone()).mangle(),
                    self.ordered(&alt.fields, fields)?,
                )
            }
            Expression::SumTest(s, alt) => {
                let t = self.type_name(s, false)?;
                CoreTerm::App(
                    CoreName::SumTest(t, alt.clone()).mangle(),
                    vec![self.expr(s)?],
                )
            }
            Expression::SumAccess(s, alt, f) => {
                let t = self.type_name(s, false)?;
                CoreTerm::App(
                    CoreName::SumAccessor(t, alt.clone(), f.clone()).mangle(),
                    vec![self.expr(s)?],
                )
            }
            Expression::Some(x) => CoreTerm::app("some", vec![self.expr(x)?]),
            Expression::None => CoreTerm::app("none", vec![]),
            Expression::Empty(t) => CoreTerm::App(CoreName::Empty(t.clone()).mangle(), vec![]),
        })
    }
}

/// Translates an expression whose free variables have the given types.
pub fn to_core_expr(
    world: &World,
    env: &[(Identifier, TypeExpr)],
    e: &Expression,
) -> Result<CoreTerm, IrError> {
    let mut fw = Forward {
        ck: Checker::typer(world),
    };
    for (n, t) in env {
        fw.ck.bind_type(n.clone(), t.clone());
    }
    fw.expr(e)
}

/// The default result of a definition: the first canonical candidate of
/// the output types satisfying the postcondition, when the postcondition
/// mentions outputs only.
fn default_output(world: &World, def: &FunctionDefinition) -> CoreTerm {
    let ev = Evaluator::new(world);
    let outputs = &def.header.outputs;
    let post = def.postcondition.as_ref().filter(|p| {
        p.free_variables()
            .iter()
            .all(|v| outputs.iter().any(|o| &o.name == v))
    });
    let result_type = def.header.result_type();
    let mut pool = candidates(world, &result_type, 4);
    pool.retain(|v| ev.has_type(v, &result_type).unwrap_or(false));
    let pick = pool
        .iter()
        .find(|v| match post {
            None => true,
            Some(p) => {
                let env: Vec<(Identifier, Value)> = if outputs.len() == 1 {
                    vec![(outputs[0].name.clone(), (*v).clone())]
                } else if let Value::Tuple(vs) = v {
                    outputs
                        .iter()
                        .map(|o| o.name.clone())
                        .zip(vs.iter().cloned())
                        .collect()
                } else {
                    vec![]
                };
                ev.eval_bool(p, &env).unwrap_or(false)
            }
        })
        .or(pool.first());
    CoreTerm::Const(pick.cloned().unwrap_or(Value::Bool(false)))
}

/// Translates a function. `world` must already hold the function (and its
/// clique) so recursive calls and measures resolve.
pub fn to_core_function(world: &World, def: &FunctionDefinition) -> Result<CoreDef, IrError> {
    let entry = world.functions.get(def.name());
    let clique: Vec<String> = entry
        .map(|e| e.clique.iter().map(|c| c.to_string()).collect())
        .unwrap_or_else(|| vec![def.name().to_string()]);
    let mut env: Vec<(Identifier, TypeExpr)> = def
        .header
        .inputs
        .iter()
        .map(|p| (p.name.clone(), p.ty.clone()))
        .collect();
    let mut guard: Vec<CoreTerm> = def
        .header
        .inputs
        .iter()
        .map(|p| recognize(&p.ty, CoreTerm::Var(p.name.to_string())))
        .collect();
    if let Some(pre) = &def.precondition {
        guard.push(to_core_expr(world, &env, pre)?);
    }
    let inner = match &def.body {
        FunctionBody::Regular(b) => to_core_expr(world, &env, b)?,
        FunctionBody::Quantified {
            quantifier,
            bound,
            matrix,
        } => {
            let mut inner_env = env.clone();
            inner_env.extend(bound.iter().map(|b| (b.name.clone(), b.ty.clone())));
            CoreTerm::Quant {
                forall: *quantifier == Quantifier::Forall,
                vars: bound
                    .iter()
                    .map(|b| (b.name.to_string(), b.ty.clone()))
                    .collect(),
                body: Box::new(to_core_expr(world, &inner_env, matrix)?),
            }
        }
    };
    let measure = match entry.and_then(|e| e.measure.as_ref()) {
        Some(m) => Some(to_core_expr(world, &env, m)?),
        None => None,
    };
    env.extend(
        def.header
            .outputs
            .iter()
            .map(|o| (o.name.clone(), o.ty.clone())),
    );
    let postcondition = match &def.postcondition {
        Some(p) => Some(to_core_expr(world, &env, p)?),
        None => None,
    };
    let origin = match entry.map(|e| &e.origin) {
        Some(crate::world::Origin::Derived { transform, .. }) => {
            CoreOrigin::Transform(transform.clone())
        }
        _ => CoreOrigin::User,
    };
    Ok(CoreDef {
        name: def.name().to_string(),
        params: def
            .header
            .inputs
            .iter()
            .map(|p| p.name.to_string())
            .collect(),
        guard: CoreTerm::and(guard),
        inner,
        default: default_output(world, def),
        measure,
        returns: def
            .header
            .outputs
            .iter()
            .map(|o| (o.name.to_string(), recognizer_name(&o.ty)))
            .collect(),
        postcondition,
        origin,
        clique,
    })
}

fn support(name: String, params: &[&str], guard: Vec<CoreTerm>, returns: &str) -> CoreDef {
    CoreDef {
        name,
        params: params.iter().map(|p| p.to_string()).collect(),
        guard: CoreTerm::and(guard),
        inner: CoreTerm::Primitive,
        default: CoreTerm::nil(),
        measure: None,
        returns: vec![("r".into(), returns.to_string())],
        postcondition: None,
        origin: CoreOrigin::TypeSupport,
        clique: vec![],
    }
}

/// A recognizer for a parameterized type instance.
pub fn instance_recognizer(t: &TypeExpr) -> CoreDef {
    support(recognizer_name(t), &["x"], vec![], "boolean-p")
}

/// Recognizer, constructors, accessors and updaters of a type.
pub fn to_core_type(world: &World, def: &TypeDefinition) -> Result<Vec<CoreDef>, IrError> {
    let t = TypeExpr::Named(def.name.clone());
    let rec = recognizer_name(&t);
    let x = || CoreTerm::var("x");
    let mut out = Vec::new();
    match &def.body {
        TypeBody::Product { fields, .. } => {
            out.push(support(rec.clone(), &["x"], vec![], "boolean-p"));
            let names: Vec<&str> = fields.iter().map(|f| f.name.as_str()).collect();
            out.push(support(
                CoreName::Constructor(def.name.clone()).mangle(),
                &names,
                fields
                    .iter()
                    .map(|f| recognize(&f.ty, CoreTerm::Var(f.name.to_string())))
                    .collect(),
                &rec,
            ));
            for f in fields {
                out.push(support(
                    CoreName::Accessor(def.name.clone(), f.name.clone()).mangle(),
                    &["x"],
                    vec![recognize(&t, x())],
                    &recognizer_name(&f.ty),
                ));
            }
            for f in fields {
                out.push(support(
                    CoreName::Updater(def.name.clone(), f.name.clone()).mangle(),
                    &["x", "v"],
                    vec![recognize(&t, x()), recognize(&f.ty, CoreTerm::var("v"))],
                    &rec,
                ));
            }
        }
        TypeBody::Sum { alternatives } => {
            out.push(support(rec.clone(), &["x"], vec![], "boolean-p"));
            for a in alternatives {
                let names: Vec<&str> = a.fields.iter().map(|f| f.name.as_str()).collect();
                out.push(support(
                    CoreName::SumConstructor(def.name.clone(), a.name.clone()).mangle(),
                    &names,
                    a.fields
                        .iter()
                        .map(|f| recognize(&f.ty, CoreTerm::Var(f.name.to_string())))
                        .collect(),
                    &rec,
                ));
                out.push(support(
                    CoreName::SumTest(def.name.clone(), a.name.clone()).mangle(),
                    &["x"],
                    vec![recognize(&t, x())],
                    "boolean-p",
                ));
                for f in &a.fields {
                    out.push(support(
                        CoreName::SumAccessor(def.name.clone(), a.name.clone(), f.name.clone())
                            .mangle(),
                        &["x"],
                        vec![recognize(&t, x())],
                        &recognizer_name(&f.ty),
                    ));
                }
            }
        }
        TypeBody::Subtype {
            supertype,
            variable,
            restriction,
            ..
        } => {
            let body = CoreTerm::and(vec![
                recognize(supertype, CoreTerm::Var(variable.to_string())),
                to_core_expr(world, &[(variable.clone(), supertype.clone())], restriction)?,
            ]);
            let mut d = support(rec, &[variable.as_str()], vec![], "boolean-p");
            d.inner = body;
            out.push(d);
        }
    }
    Ok(out)
}
