//! The surface evaluator.

use std::cell::Cell;

use crate::ir::mangle::builtin_core_name;
use crate::syntax::{
    parse_type, BinaryOp, Expression, FunctionBody, Identifier, Literal, TypeBody, TypeExpr,
    UnaryOp,
};
use crate::world::World;

use super::{builtins, EvalError, Value};

/// Name prefix of the internal membership test used in coercion
/// obligations: `#has_type:seq<positive>(e)`.
pub const HAS_TYPE: &str = "#has_type:";

pub const DEFAULT_MAX_DEPTH: usize = 100_000;

#[derive(Clone, Copy, Debug)]
pub struct EvalConfig {
    pub max_depth: usize,
    pub check_guards: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            max_depth: DEFAULT_MAX_DEPTH,
            check_guards: true,
        }
    }
}

pub type Env = Vec<(Identifier, Value)>;

pub struct Evaluator<'w> {
    world: &'w World,
    config: EvalConfig,
    depth: Cell<usize>,
    /// Specification function variables bound to world functions.
    bindings: Vec<(Identifier, Identifier)>,
}

fn lookup<'a>(env: &'a Env, name: &str) -> Option<&'a Value> {
    env.iter()
        .rev()
        .find(|(n, _)| n.as_str() == name)
        .map(|(_, v)| v)
}

fn show_env(env: &[(Identifier, Value)]) -> String {
    env.iter()
        .map(|(n, v)| format!("{n} = {v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn bool_of(v: Value, what: &str) -> Result<bool, EvalError> {
    v.as_bool()
        .ok_or_else(|| EvalError::Type(format!("{what} is not a boolean: {v}")))
}

fn core_op(op: BinaryOp) -> &'static str {
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

impl<'w> Evaluator<'w> {
    pub fn new(world: &'w World) -> Self {
        Evaluator::with_config(world, EvalConfig::default())
    }

    pub fn with_config(world: &'w World, config: EvalConfig) -> Self {
        Evaluator {
            world,
            config,
            depth: Cell::new(0),
            bindings: Vec::new(),
        }
    }

    /// Makes calls to `var` run `function`.
    pub fn bind_function(&mut self, var: Identifier, function: Identifier) {
        self.bindings.push((var, function));
    }

    pub fn world(&self) -> &'w World {
        self.world
    }

    /// Evaluates a closed expression under the given variable bindings.
    pub fn eval(&self, e: &Expression, env: &Env) -> Result<Value, EvalError> {
        let mut env = env.clone();
        self.eval_in(e, &mut env, None)
    }

    pub fn eval_bool(&self, e: &Expression, env: &Env) -> Result<bool, EvalError> {
        bool_of(self.eval(e, env)?, "formula")
    }

    /// Calls a world function from outside any function.
    pub fn call(&self, name: &str, args: Vec<Value>) -> Result<Value, EvalError> {
        self.call_in(name, args, None)
    }

    fn eval_in(
        &self,
        e: &Expression,
        env: &mut Env,
        current: Option<&Identifier>,
    ) -> Result<Value, EvalError> {
        Ok(match e {
            Expression::Literal(l) => match l {
                Literal::Bool(b) => Value::Bool(*b),
                Literal::Char(c) => Value::Char(*c),
                Literal::String(s) => Value::String(s.clone()),
                Literal::Int(n) => Value::Int(n.clone()),
            },
            Expression::Variable(v) => lookup(env, v)
                .cloned()
                .ok_or_else(|| EvalError::Unknown(format!("variable {v}")))?,
            Expression::Unary(op, a) => {
                let v = self.eval_in(a, env, current)?;
                let name = match op {
                    UnaryOp::Not => "not",
                    UnaryOp::Neg => "unary--",
                };
                builtins::apply(name, vec![v])?
            }
            Expression::Binary(op, l, r) => match op {
                BinaryOp::And | BinaryOp::Or | BinaryOp::Implies => {
                    let lv = bool_of(self.eval_in(l, env, current)?, "operand")?;
                    let short = match op {
                        BinaryOp::And => (!lv).then_some(false),
                        BinaryOp::Or => lv.then_some(true),
                        _ => (!lv).then_some(true),
                    };
                    match short {
                        Some(b) => Value::Bool(b),
                        None => Value::Bool(bool_of(self.eval_in(r, env, current)?, "operand")?),
                    }
                }
                BinaryOp::ImpliedBy => {
                    let rv = bool_of(self.eval_in(r, env, current)?, "operand")?;
                    if !rv {
                        Value::Bool(true)
                    } else {
                        Value::Bool(bool_of(self.eval_in(l, env, current)?, "operand")?)
                    }
                }
                _ => {
                    let lv = self.eval_in(l, env, current)?;
                    let rv = self.eval_in(r, env, current)?;
                    builtins::apply(core_op(*op), vec![lv, rv])?
                }
            },
            Expression::Conditional {
                test,
                then,
                otherwise,
            } => {
                if bool_of(self.eval_in(test, env, current)?, "test")? {
                    self.eval_in(then, env, current)?
                } else {
                    self.eval_in(otherwise, env, current)?
                }
            }
            Expression::Call(f, args) => {
                let vals = args
                    .iter()
                    .map(|a| self.eval_in(a, env, current))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(ty) = f.strip_prefix(HAS_TYPE) {
                    let t = parse_type(ty).map_err(|_| EvalError::Unknown(format!("type {ty}")))?;
                    return Ok(Value::Bool(self.has_type(&vals[0], &t)?));
                }
                self.call_in(f, vals, current)?
            }
            Expression::Bind { locals, body } => {
                let mut vals = Vec::with_capacity(locals.len());
                for l in locals {
                    let v = self.eval_in(&l.value, env, current)?;
                    if self.config.check_guards && !self.has_type(&v, &l.ty)? {
                        return Err(EvalError::GuardViolation {
                            guard: format!("{}: {}", l.name, l.ty),
                            detail: format!("{} = {v}", l.name),
                        });
                    }
                    vals.push((l.name.clone(), v));
                }
                let n = env.len();
                env.extend(vals);
                let out = self.eval_in(body, env, current);
                env.truncate(n);
                out?
            }
            Expression::Tuple(es) => Value::Tuple(
                es.iter()
                    .map(|a| self.eval_in(a, env, current))
                    .collect::<Result<_, _>>()?,
            ),
            Expression::TupleAccess(t, i) => match self.eval_in(t, env, current)? {
                Value::Tuple(mut vs) if *i < vs.len() => vs.swap_remove(*i),
                v => return Err(EvalError::Type(format!("component {i} of {v}"))),
            },
            Expression::ProductConstruct { ty, fields } => {
                let decl = self
                    .world
                    .product_fields(ty)
                    .ok_or_else(|| EvalError::Unknown(format!("product type {ty}")))?;
                let mut vals = Vec::with_capacity(decl.len());
                for d in decl {
                    let (_, e) = fields
                        .iter()
                        .find(|(n, _)| n == &d.name)
                        .ok_or_else(|| EvalError::Type(format!("missing field {}", d.name)))?;
                    vals.push((d.name.clone(), self.eval_in(e, env, current)?));
                }
                let v = Value::Product {
                    ty: ty.clone(),
                    fields: vals,
                };
                self.check_membership(&v, &TypeExpr::Named(ty.clone()))?;
                v
            }
            Expression::ProductAccess(p, f) => {
                let v = self.eval_in(p, env, current)?;
                v.field(f)
                    .cloned()
                    .ok_or_else(|| EvalError::Type(format!("no field {f} in {v}")))?
            }
            Expression::ProductUpdate(p, updates) => {
                let v = self.eval_in(p, env, current)?;
                let Value::Product { ty, mut fields } = v else {
                    return Err(EvalError::Type(format!("update of non-product {v}")));
                };
                for (n, e) in updates {
                    let nv = self.eval_in(e, env, current)?;
                    match fields.iter_mut().find(|(m, _)| m == n) {
                        Some(slot) => slot.1 = nv,
                        None => return Err(EvalError::Type(format!("no field {n}"))),
                    }
                }
                let v = Value::Product { ty, fields };
                if let Value::Product { ty, .. } = &v {
                    self.check_membership(&v, &TypeExpr::Named(ty.clone()))?;
                }
                v
            }
            Expression::SumConstruct {
                ty,
                alternative,
                fields,
            } => {
                let alt = self
                    .world
                    .alternative(ty, alternative)
                    .ok_or_else(|| EvalError::Unknown(format!("{ty}::{alternative}")))?;
                let mut vals = Vec::with_capacity(alt.fields.len());
                for d in &alt.fields {
                    let (_, e) = fields
                        .iter()
                        .find(|(n, _)| n == &d.name)
                        .ok_or_else(|| EvalError::Type(format!("missing field {}", d.name)))?;
                    vals.push((d.name.clone(), self.eval_in(e, env, current)?));
                }
                let v = Value::Sum {
                    ty: ty.clone(),
                    alternative: alternative.clone(),
                    fields: vals,
                };
                self.check_membership(&v, &TypeExpr::Named(ty.clone()))?;
                v
            }
            Expression::SumTest(s, alt) => match self.eval_in(s, env, current)? {
                Value::Sum { alternative, .. } => Value::Bool(&alternative == alt),
                v => return Err(EvalError::Type(format!("{v} is not a sum"))),
            },
            Expression::SumAccess(s, alt, f) => match self.eval_in(s, env, current)? {
                v @ Value::Sum { .. } => {
                    let Value::Sum { alternative, .. } = &v else {
                        unreachable!()
                    };
                    if alternative != alt {
                        return Err(EvalError::GuardViolation {
                            guard: format!("is {alt}"),
                            detail: v.to_string(),
                        });
                    }
                    v.field(f)
                        .cloned()
                        .ok_or_else(|| EvalError::Type(format!("no field {f}")))?
                }
                v => return Err(EvalError::Type(format!("{v} is not a sum"))),
            },
            Expression::Some(x) => Value::Option(Some(Box::new(self.eval_in(x, env, current)?))),
            Expression::None => Value::Option(None),
            Expression::Empty(t) => match self.world.root(t) {
                TypeExpr::Seq(_) => Value::Seq(Vec::new()),
                TypeExpr::Set(_) => Value::Set(Default::default()),
                TypeExpr::Map(_, _) => Value::Map(Default::default()),
                TypeExpr::String => Value::String(String::new()),
                other => return Err(EvalError::Type(format!("empty<{other}>"))),
            },
        })
    }

    fn check_membership(&self, v: &Value, t: &TypeExpr) -> Result<(), EvalError> {
        if self.config.check_guards && !self.has_type(v, t)? {
            return Err(EvalError::GuardViolation {
                guard: format!("value of type {t}"),
                detail: v.to_string(),
            });
        }
        Ok(())
    }

    fn call_in(
        &self,
        name: &str,
        args: Vec<Value>,
        current: Option<&Identifier>,
    ) -> Result<Value, EvalError> {
        if let Some(core) = builtin_core_name(name) {
            return builtins::apply(core, args);
        }
        let target = self
            .bindings
            .iter()
            .rev()
            .find(|(v, _)| v.as_str() == name)
            .map(|(_, f)| f.as_str())
            .unwrap_or(name);
        let entry = self
            .world
            .functions
            .get(target)
            .ok_or_else(|| EvalError::Unknown(format!("function {target}")))?;
        let def = &entry.def;
        let body = match &def.body {
            FunctionBody::Regular(b) => b,
            FunctionBody::Quantified { .. } => {
                return Err(EvalError::NonExecutable(target.to_string()))
            }
        };
        if args.len() != def.header.inputs.len() {
            return Err(EvalError::Type(format!("arity of {target}")));
        }
        let mut env: Env = def
            .header
            .inputs
            .iter()
            .map(|p| p.name.clone())
            .zip(args)
            .collect();
        let internal = current.is_some_and(|c| entry.clique.contains(c));
        if self.config.check_guards && !internal {
            for ((n, v), p) in env.iter().zip(&def.header.inputs) {
                if !self.has_type(v, &p.ty)? {
                    return Err(EvalError::GuardViolation {
                        guard: format!("{}: {} in call of {target}", n, p.ty),
                        detail: show_env(&env),
                    });
                }
            }
            if let Some(pre) = &def.precondition {
                let ok = bool_of(
                    self.eval_in(pre, &mut env, Some(&def.header.name))?,
                    "precondition",
                )?;
                if !ok {
                    return Err(EvalError::GuardViolation {
                        guard: format!("precondition of {target}: {pre}"),
                        detail: show_env(&env),
                    });
                }
            }
        }
        let depth = self.depth.get() + 1;
        if depth > self.config.max_depth {
            return Err(EvalError::DepthExceeded(self.config.max_depth));
        }
        self.depth.set(depth);
        let out = stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || {
            self.eval_in(body, &mut env, Some(&def.header.name))
        });
        self.depth.set(depth - 1);
        out
    }

    /// Membership of a value in a type, evaluating restrictions and
    /// invariants.
    pub fn has_type(&self, v: &Value, t: &TypeExpr) -> Result<bool, EvalError> {
        Ok(match (t, v) {
            (TypeExpr::Bool, Value::Bool(_))
            | (TypeExpr::Char, Value::Char(_))
            | (TypeExpr::Int, Value::Int(_))
            | (TypeExpr::String, Value::String(_)) => true,
            (TypeExpr::Option(b), Value::Option(o)) => match o {
                Some(x) => self.has_type(x, b)?,
                None => true,
            },
            (TypeExpr::Seq(b), Value::Seq(xs)) => self.all_have(xs.iter(), b)?,
            (TypeExpr::Set(b), Value::Set(xs)) => self.all_have(xs.iter(), b)?,
            (TypeExpr::Map(d, r), Value::Map(m)) => {
                self.all_have(m.keys(), d)? && self.all_have(m.values(), r)?
            }
            (TypeExpr::Tuple(ts), Value::Tuple(vs)) => {
                if ts.len() != vs.len() {
                    return Ok(false);
                }
                for (t, v) in ts.iter().zip(vs) {
                    if !self.has_type(v, t)? {
                        return Ok(false);
                    }
                }
                true
            }
            (TypeExpr::Named(n), v) => {
                let Some(def) = self.world.type_def(n) else {
                    return Ok(false);
                };
                match (&def.body, v) {
                    (
                        TypeBody::Subtype {
                            supertype,
                            variable,
                            restriction,
                            ..
                        },
                        v,
                    ) => {
                        self.has_type(v, supertype)? && {
                            let env = vec![(variable.clone(), v.clone())];
                            bool_of(self.eval(restriction, &env)?, "restriction")?
                        }
                    }
                    (
                        TypeBody::Product { fields, invariant },
                        Value::Product { ty, fields: vs },
                    ) => {
                        if ty != n || vs.len() != fields.len() {
                            return Ok(false);
                        }
                        for (d, (vn, fv)) in fields.iter().zip(vs) {
                            if &d.name != vn || !self.has_type(fv, &d.ty)? {
                                return Ok(false);
                            }
                        }
                        match invariant {
                            Some(inv) => bool_of(self.eval(inv, vs)?, "invariant")?,
                            None => true,
                        }
                    }
                    (
                        TypeBody::Sum { alternatives },
                        Value::Sum {
                            ty,
                            alternative,
                            fields: vs,
                        },
                    ) => {
                        if ty != n {
                            return Ok(false);
                        }
                        let Some(alt) = alternatives.iter().find(|a| &a.name == alternative) else {
                            return Ok(false);
                        };
                        if alt.fields.len() != vs.len() {
                            return Ok(false);
                        }
                        for (d, (vn, fv)) in alt.fields.iter().zip(vs) {
                            if &d.name != vn || !self.has_type(fv, &d.ty)? {
                                return Ok(false);
                            }
                        }
                        true
                    }
                    _ => false,
                }
            }
            _ => false,
        })
    }

    fn all_have<'a>(
        &self,
        mut xs: impl Iterator<Item = &'a Value>,
        t: &TypeExpr,
    ) -> Result<bool, EvalError> {
        xs.try_fold(true, |ok, x| Ok(ok && self.has_type(x, t)?))
    }
}
