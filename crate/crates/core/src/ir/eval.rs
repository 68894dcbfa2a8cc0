//! The core evaluator.

use std::cell::Cell;

use crate::eval::{builtins, EvalError, Evaluator, Value, DEFAULT_MAX_DEPTH};
use crate::syntax::TypeExpr;
use crate::world::World;

use super::mangle::CoreName;
use super::term::CoreTerm;

pub type CoreEnv = Vec<(String, Value)>;

pub struct CoreEvaluator<'w> {
    world: &'w World,
    surface: Evaluator<'w>,
    depth: Cell<usize>,
    max_depth: usize,
}

fn as_bool(v: Value) -> Result<bool, EvalError> {
    v.as_bool()
        .ok_or_else(|| EvalError::Type(format!("{v} is not a boolean")))
}

impl<'w> CoreEvaluator<'w> {
    pub fn new(world: &'w World) -> Self {
        CoreEvaluator {
            world,
            surface: Evaluator::new(world),
            depth: Cell::new(0),
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }

    pub fn eval(&self, t: &CoreTerm, env: &CoreEnv) -> Result<Value, EvalError> {
        self.eval_in(t, env, None)
    }

    /// Calls a core definition from outside any definition.
    pub fn call(&self, name: &str, args: Vec<Value>) -> Result<Value, EvalError> {
        self.apply(name, args, None)
    }

    fn eval_in(
        &self,
        t: &CoreTerm,
        env: &CoreEnv,
        current: Option<&str>,
    ) -> Result<Value, EvalError> {
        Ok(match t {
            CoreTerm::Const(v) => v.clone(),
            CoreTerm::Var(v) => env
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, x)| x.clone())
                .ok_or_else(|| EvalError::Unknown(format!("variable {v}")))?,
            CoreTerm::If(c, a, b) => {
                if as_bool(self.eval_in(c, env, current)?)? {
                    self.eval_in(a, env, current)?
                } else {
                    self.eval_in(b, env, current)?
                }
            }
            CoreTerm::Let(bs, body) => {
                let mut inner = env.clone();
                for b in bs {
                    let v = self.eval_in(&b.value, env, current)?;
                    inner.push((b.name.clone(), v));
                }
                self.eval_in(body, &inner, current)?
            }
            CoreTerm::Assume(g) => {
                if !as_bool(self.eval_in(g, env, current)?)? {
                    return Err(EvalError::GuardViolation {
                        guard: g.to_string(),
                        detail: String::new(),
                    });
                }
                Value::Bool(true)
            }
            CoreTerm::Quant { .. } => return Err(EvalError::NonExecutable(t.to_string())),
            CoreTerm::Primitive => return Err(EvalError::Unknown("primitive body".into())),
            CoreTerm::App(f, args) => match f.as_str() {
                "and" => {
                    for a in args {
                        if !as_bool(self.eval_in(a, env, current)?)? {
                            return Ok(Value::Bool(false));
                        }
                    }
                    Value::Bool(true)
                }
                "or" => {
                    for a in args {
                        if as_bool(self.eval_in(a, env, current)?)? {
                            return Ok(Value::Bool(true));
                        }
                    }
                    Value::Bool(false)
                }
                "implies" | "implied" if args.len() == 2 => {
                    let (first, second) = if f == "implies" {
                        (&args[0], &args[1])
                    } else {
                        (&args[1], &args[0])
                    };
                    if !as_bool(self.eval_in(first, env, current)?)? {
                        Value::Bool(true)
                    } else {
                        Value::Bool(as_bool(self.eval_in(second, env, current)?)?)
                    }
                }
                _ => {
                    let vals = args
                        .iter()
                        .map(|a| self.eval_in(a, env, current))
                        .collect::<Result<Vec<_>, _>>()?;
                    self.apply(f, vals, current)?
                }
            },
        })
    }

    fn check(&self, v: Value, t: &TypeExpr) -> Result<Value, EvalError> {
        if self.surface.has_type(&v, t)? {
            Ok(v)
        } else {
            Err(EvalError::GuardViolation {
                guard: format!("value of type {t}"),
                detail: v.to_string(),
            })
        }
    }

    fn apply(&self, f: &str, args: Vec<Value>, current: Option<&str>) -> Result<Value, EvalError> {
        let name = CoreName::demangle(f).ok_or_else(|| EvalError::Unknown(f.to_string()))?;
        let world = self.world;
        let unknown = || EvalError::Unknown(f.to_string());
        Ok(match name {
            CoreName::Builtin(op) => builtins::apply(&op, args)?,
            CoreName::Recognizer(t) => Value::Bool(self.surface.has_type(&args[0], &t)?),
            CoreName::Constructor(t) => {
                let decl = world.product_fields(&t).ok_or_else(unknown)?;
                let v = Value::Product {
                    ty: t.clone(),
                    fields: decl.iter().map(|d| d.name.clone()).zip(args).collect(),
                };
                self.check(v, &TypeExpr::Named(t))?
            }
            CoreName::SumConstructor(t, a) => {
                let alt = world.alternative(&t, &a).ok_or_else(unknown)?;
                let v = Value::Sum {
                    ty: t.clone(),
                    alternative: a,
                    fields: alt
                        .fields
                        .iter()
                        .map(|d| d.name.clone())
                        .zip(args)
                        .collect(),
                };
                self.check(v, &TypeExpr::Named(t))?
            }
            CoreName::Accessor(_, field) => args[0].field(&field).cloned().ok_or_else(unknown)?,
            CoreName::Updater(t, field) => {
                let mut it = args.into_iter();
                let (Some(Value::Product { ty, mut fields }), Some(nv)) = (it.next(), it.next())
                else {
                    return Err(unknown());
                };
                match fields.iter_mut().find(|(n, _)| *n == field) {
                    Some(slot) => slot.1 = nv,
                    None => return Err(unknown()),
                }
                self.check(Value::Product { ty, fields }, &TypeExpr::Named(t))?
            }
            CoreName::SumTest(_, a) => match &args[0] {
                Value::Sum { alternative, .. } => Value::Bool(*alternative == a),
                _ => return Err(unknown()),
            },
            CoreName::SumAccessor(_, a, field) => match &args[0] {
                Value::Sum { alternative, .. } if *alternative == a => {
                    args[0].field(&field).cloned().ok_or_else(unknown)?
                }
                v => {
                    return Err(EvalError::GuardViolation {
                        guard: format!("is {a}"),
                        detail: v.to_string(),
                    })
                }
            },
            CoreName::Empty(t) => match world.root(&t) {
                TypeExpr::Seq(_) => Value::Seq(Vec::new()),
                TypeExpr::Set(_) => Value::Set(Default::default()),
                TypeExpr::Map(_, _) => Value::Map(Default::default()),
                _ => return Err(unknown()),
            },
            CoreName::User(_) => {
                let def = world.core.get(f).ok_or_else(unknown)?;
                if def.params.len() != args.len() {
                    return Err(EvalError::Type(format!("arity of {f}")));
                }
                let env: CoreEnv = def.params.iter().cloned().zip(args).collect();
                let internal = current.is_some_and(|c| def.clique.iter().any(|m| m == c));
                if !internal && !as_bool(self.eval_in(&def.guard, &env, Some(f))?)? {
                    let shown: Vec<String> =
                        env.iter().map(|(n, v)| format!("{n} = {v}")).collect();
                    return Err(EvalError::GuardViolation {
                        guard: format!("guard of {f}: {}", def.guard),
                        detail: shown.join(", "),
                    });
                }
                let depth = self.depth.get() + 1;
                if depth > self.max_depth {
                    return Err(EvalError::DepthExceeded(self.max_depth));
                }
                self.depth.set(depth);
                let out = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
                    self.eval_in(&def.inner, &env, Some(f))
                });
                self.depth.set(depth - 1);
                out?
            }
        })
    }
}
