//! Expression typing with obligation collection.

use crate::eval::HAS_TYPE;
use crate::syntax::{
    print_type, BinaryOp, Expression, FunctionHeader, Identifier, Literal, TypeExpr, TypedName,
    UnaryOp,
};
use crate::world::World;

use super::{Obligation, Provenance, TypeError, TypeErrorKind};

/// A call to a member of the clique being checked.
#[derive(Clone, Debug)]
pub struct RecursiveCall {
    pub callee: Identifier,
    /// Arguments with local bindings substituted away.
    pub args: Vec<Expression>,
    pub hypotheses: Vec<Expression>,
}

pub struct Checker<'w> {
    pub world: &'w World,
    pub source: Identifier,
    /// Variables of emitted obligations.
    pub variables: Vec<TypedName>,
    env: Vec<(Identifier, TypeExpr)>,
    hyps: Vec<Expression>,
    subst: Vec<(Identifier, Expression)>,
    pub obligations: Vec<Obligation>,
    /// Specification function variables.
    pub headers: Vec<FunctionHeader>,
    /// Members of the function clique being checked.
    pub clique: Vec<Identifier>,
    pub recursive_calls: Vec<RecursiveCall>,
    pub emit: bool,
}

fn err(kind: TypeErrorKind, message: impl Into<String>) -> TypeError {
    TypeError::new(kind, message)
}

fn mismatch(e: &Expression, expected: &TypeExpr, actual: &TypeExpr) -> TypeError {
    err(
        TypeErrorKind::TypeMismatch,
        format!("`{e}` has type {actual}, expected {expected}"),
    )
}

impl<'w> Checker<'w> {
    pub fn new(world: &'w World, source: Identifier) -> Self {
        Checker {
            world,
            source,
            variables: Vec::new(),
            env: Vec::new(),
            hyps: Vec::new(),
            subst: Vec::new(),
            obligations: Vec::new(),
            headers: Vec::new(),
            clique: Vec::new(),
            recursive_calls: Vec::new(),
            emit: true,
        }
    }

    /// Binds a variable both in the typing environment and as an
    /// obligation variable.
    pub fn declare(&mut self, v: &TypedName) {
        self.env.push((v.name.clone(), v.ty.clone()));
        self.variables.push(v.clone());
    }

    pub fn bind_type(&mut self, name: Identifier, ty: TypeExpr) {
        self.env.push((name, ty));
    }

    pub fn env_len(&self) -> usize {
        self.env.len()
    }

    pub fn truncate_env(&mut self, n: usize) {
        self.env.truncate(n);
    }

    /// A checker that types expressions without emitting obligations.
    pub fn typer(world: &'w World) -> Self {
        let mut c = Checker::new(world, Identifier::unchecked(String::new()));
        c.emit = false;
        c
    }

    /// Replaces `name` by `value` in emitted obligations.
    pub fn bind_value(&mut self, name: Identifier, value: Expression) {
        self.subst.push((name, value));
    }

    pub fn push_hypothesis(&mut self, h: &Expression) {
        let h = h.substitute(&self.subst);
        self.hyps.push(h);
    }

    pub fn pop_hypothesis(&mut self) {
        self.hyps.pop();
    }

    pub fn hypotheses(&self) -> &[Expression] {
        &self.hyps
    }

    pub fn emit_obligation(&mut self, provenance: Provenance, conclusion: Expression) {
        if !self.emit {
            return;
        }
        let conclusion = conclusion.substitute(&self.subst);
        if conclusion == Expression::bool(true) {
            return;
        }
        self.obligations.push(Obligation {
            provenance,
            source: self.source.clone(),
            variables: self.variables.clone(),
            hypotheses: self.hyps.clone(),
            conclusion,
        });
    }

    fn lookup(&self, v: &Identifier) -> Option<&TypeExpr> {
        self.env.iter().rev().find(|(n, _)| n == v).map(|(_, t)| t)
    }

    pub fn check_type_wellformed(&self, t: &TypeExpr) -> Result<(), TypeError> {
        match t {
            TypeExpr::Named(n) => {
                if self.world.type_def(n).is_none() {
                    return Err(err(TypeErrorKind::UnknownType, format!("unknown type {n}")));
                }
                Ok(())
            }
            t => t
                .children()
                .into_iter()
                .try_for_each(|c| self.check_type_wellformed(c)),
        }
    }

    /// Checks `e` has a type compatible with `expected`, emitting
    /// coercion obligations where values must be narrowed.
    pub fn check_against(&mut self, e: &Expression, expected: &TypeExpr) -> Result<(), TypeError> {
        match (e, self.world.root(expected)) {
            (Expression::Tuple(es), TypeExpr::Tuple(ts)) if es.len() == ts.len() => {
                for (x, t) in es.iter().zip(&ts) {
                    self.check_against(x, t)?;
                }
                return Ok(());
            }
            (
                Expression::Conditional {
                    test,
                    then,
                    otherwise,
                },
                _,
            ) => {
                self.check_bool(test)?;
                self.push_hypothesis(test);
                let r = self.check_against(then, expected);
                self.pop_hypothesis();
                r?;
                self.push_hypothesis(&Expression::not((**test).clone()));
                let r = self.check_against(otherwise, expected);
                self.pop_hypothesis();
                return r;
            }
            (Expression::Bind { locals, body }, _) => {
                return self.with_locals(locals, |c| c.check_against(body, expected));
            }
            _ => {}
        }
        let actual = self.infer(e, Some(expected))?;
        if !self.world.compatible(&actual, expected) {
            return Err(mismatch(e, expected, &actual));
        }
        self.coerce(e, &actual, expected);
        Ok(())
    }

    fn coerce(&mut self, e: &Expression, actual: &TypeExpr, expected: &TypeExpr) {
        if self.world.is_subtype(actual, expected) {
            return;
        }
        if let TypeExpr::Named(n) = expected {
            if let Some(crate::syntax::TypeBody::Subtype {
                supertype,
                variable,
                restriction,
                ..
            }) = self.world.type_def(n).map(|d| &d.body)
            {
                let (supertype, variable, restriction) =
                    (supertype.clone(), variable.clone(), restriction.clone());
                self.coerce(e, actual, &supertype);
                self.emit_obligation(
                    Provenance::SubtypeRestriction,
                    restriction.substitute(&[(variable, e.clone())]),
                );
                return;
            }
        }
        let name = Identifier::unchecked(format!("{HAS_TYPE}{}", print_type(expected)));
        self.emit_obligation(
            Provenance::SubtypeRestriction,
            Expression::Call(name, vec![e.clone()]),
        );
    }

    pub fn check_bool(&mut self, e: &Expression) -> Result<(), TypeError> {
        self.check_against(e, &TypeExpr::Bool)
    }

    fn with_locals<T>(
        &mut self,
        locals: &[crate::syntax::LocalBinding],
        f: impl FnOnce(&mut Self) -> Result<T, TypeError>,
    ) -> Result<T, TypeError> {
        for l in locals {
            self.check_type_wellformed(&l.ty)?;
            self.check_against(&l.value, &l.ty)?;
        }
        let names: Vec<&Identifier> = locals.iter().map(|l| &l.name).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(err(
                    TypeErrorKind::DuplicateName,
                    format!("{n} bound twice"),
                ));
            }
        }
        let values: Vec<(Identifier, Expression)> = locals
            .iter()
            .map(|l| (l.name.clone(), l.value.substitute(&self.subst)))
            .collect();
        let (env_n, subst_saved) = (self.env.len(), self.subst.clone());
        self.subst.retain(|(k, _)| !names.contains(&k));
        self.subst.extend(values);
        for l in locals {
            self.env.push((l.name.clone(), l.ty.clone()));
        }
        let r = f(self);
        self.env.truncate(env_n);
        self.subst = subst_saved;
        r
    }

    fn infer_int(&mut self, e: &Expression) -> Result<(), TypeError> {
        self.check_against(e, &TypeExpr::Int)
    }

    /// The type of `e`; `expected` only guides `none`.
    pub fn infer(
        &mut self,
        e: &Expression,
        expected: Option<&TypeExpr>,
    ) -> Result<TypeExpr, TypeError> {
        Ok(match e {
            Expression::Literal(l) => match l {
                Literal::Bool(_) => TypeExpr::Bool,
                Literal::Char(_) => TypeExpr::Char,
                Literal::String(_) => TypeExpr::String,
                Literal::Int(_) => TypeExpr::Int,
            },
            Expression::Variable(v) => self.lookup(v).cloned().ok_or_else(|| {
                err(
                    TypeErrorKind::UnknownVariable,
                    format!("unknown variable {v}"),
                )
            })?,
            Expression::Unary(UnaryOp::Not, a) => {
                self.check_bool(a)?;
                TypeExpr::Bool
            }
            Expression::Unary(UnaryOp::Neg, a) => {
                self.infer_int(a)?;
                TypeExpr::Int
            }
            Expression::Binary(op, l, r) => self.infer_binary(e, *op, l, r)?,
            Expression::Conditional {
                test,
                then,
                otherwise,
            } => {
                // compute the join quietly, then check loudly against it
                let (a, b) = {
                    let mut quiet = self.quiet();
                    quiet.check_bool(test)?;
                    match expected {
                        Some(t) => (
                            quiet.infer(then, Some(t))?,
                            quiet.infer(otherwise, Some(t))?,
                        ),
                        None if **then == Expression::None => {
                            let b = quiet.infer(otherwise, None)?;
                            (quiet.infer(then, Some(&b))?, b)
                        }
                        None => {
                            let a = quiet.infer(then, None)?;
                            let b = quiet.infer(otherwise, Some(&a))?;
                            (a, b)
                        }
                    }
                };
                let join = self
                    .join(&a, &b)
                    .ok_or_else(|| mismatch(otherwise, &a, &b))?;
                self.check_against(e, &join)?;
                join
            }
            Expression::Call(f, args) => self.infer_call(f, args)?,
            Expression::Bind { locals, body } => {
                self.with_locals(locals, |c| c.infer(body, expected))?
            }
            Expression::Tuple(es) => {
                let expected_components = match expected.map(|t| self.world.root(t)) {
                    Some(TypeExpr::Tuple(ts)) if ts.len() == es.len() => Some(ts),
                    _ => None,
                };
                let mut ts = Vec::new();
                for (i, x) in es.iter().enumerate() {
                    let exp = expected_components.as_ref().map(|ts| &ts[i]);
                    ts.push(self.infer(x, exp)?);
                }
                TypeExpr::Tuple(ts)
            }
            Expression::TupleAccess(t, i) => match self.world.root(&self.infer(t, None)?) {
                TypeExpr::Tuple(ts) if *i < ts.len() => ts[*i].clone(),
                other => {
                    return Err(err(
                        TypeErrorKind::TypeMismatch,
                        format!("component {i} of non-tuple or short tuple of type {other}"),
                    ))
                }
            },
            Expression::ProductConstruct { ty, fields } => {
                let Some(crate::syntax::TypeBody::Product {
                    fields: decl,
                    invariant,
                }) = self.world.type_def(ty).map(|d| &d.body)
                else {
                    return Err(err(
                        TypeErrorKind::UnknownType,
                        format!("{ty} is not a product type"),
                    ));
                };
                let (decl, invariant) = (decl.clone(), invariant.clone());
                self.check_field_set(ty, &decl, fields)?;
                for (n, v) in fields {
                    let d = decl.iter().find(|d| &d.name == n).expect("checked");
                    self.check_against(v, &d.ty)?;
                }
                if let Some(inv) = invariant {
                    let map: Vec<(Identifier, Expression)> = fields.clone();
                    self.emit_obligation(Provenance::ProductInvariant, inv.substitute(&map));
                }
                TypeExpr::Named(ty.clone())
            }
            Expression::ProductAccess(p, f) => {
                let pt = self.infer(p, None)?;
                let (_, fields, _) = self.world.product_of(&pt).ok_or_else(|| {
                    err(
                        TypeErrorKind::TypeMismatch,
                        format!("`{p}` of type {pt} has no fields"),
                    )
                })?;
                fields
                    .iter()
                    .find(|d| &d.name == f)
                    .map(|d| d.ty.clone())
                    .ok_or_else(|| {
                        err(TypeErrorKind::UnknownField, format!("no field {f} in {pt}"))
                    })?
            }
            Expression::ProductUpdate(p, updates) => {
                let pt = self.infer(p, None)?;
                let (name, fields, invariant) = self.world.product_of(&pt).ok_or_else(|| {
                    err(
                        TypeErrorKind::TypeMismatch,
                        format!("`{p}` of type {pt} has no fields"),
                    )
                })?;
                let (name, fields, invariant) = (name.clone(), fields.to_vec(), invariant.cloned());
                for (i, (n, v)) in updates.iter().enumerate() {
                    if updates[..i].iter().any(|(m, _)| m == n) {
                        return Err(err(
                            TypeErrorKind::DuplicateName,
                            format!("field {n} updated twice"),
                        ));
                    }
                    let d = fields.iter().find(|d| &d.name == n).ok_or_else(|| {
                        err(
                            TypeErrorKind::UnknownField,
                            format!("no field {n} in {name}"),
                        )
                    })?;
                    self.check_against(v, &d.ty)?;
                }
                if let Some(inv) = invariant {
                    let map: Vec<(Identifier, Expression)> = fields
                        .iter()
                        .map(|d| {
                            let v = updates
                                .iter()
                                .find(|(n, _)| n == &d.name)
                                .map(|(_, v)| v.clone())
                                .unwrap_or_else(|| {
                                    Expression::ProductAccess(p.clone(), d.name.clone())
                                });
                            (d.name.clone(), v)
                        })
                        .collect();
                    self.emit_obligation(Provenance::ProductInvariant, inv.substitute(&map));
                }
                TypeExpr::Named(name)
            }
            Expression::SumConstruct {
                ty,
                alternative,
                fields,
            } => {
                let alt = self
                    .world
                    .alternative(ty, alternative)
                    .ok_or_else(|| {
                        err(
                            TypeErrorKind::UnknownAlternative,
                            format!("no alternative {ty}::{alternative}"),
                        )
                    })?
                    .clone();
                self.check_field_set(ty, &alt.fields, fields)?;
                for (n, v) in fields {
                    let d = alt.fields.iter().find(|d| &d.name == n).expect("checked");
                    self.check_against(v, &d.ty)?;
                }
                TypeExpr::Named(ty.clone())
            }
            Expression::SumTest(s, alt) => {
                self.sum_alternative(s, alt)?;
                TypeExpr::Bool
            }
            Expression::SumAccess(s, alt, f) => {
                let a = self.sum_alternative(s, alt)?;
                a.fields
                    .iter()
                    .find(|d| &d.name == f)
                    .map(|d| d.ty.clone())
                    .ok_or_else(|| {
                        err(
                            TypeErrorKind::UnknownField,
                            format!("no field {f} in {alt}"),
                        )
                    })?
            }
            Expression::Some(x) => {
                let inner = match expected.map(|t| self.world.root(t)) {
                    Some(TypeExpr::Option(b)) => Some(*b),
                    _ => None,
                };
                TypeExpr::Option(Box::new(self.infer(x, inner.as_ref())?))
            }
            Expression::None => match expected {
                Some(t) if matches!(self.world.root(t), TypeExpr::Option(_)) => t.clone(),
                _ => {
                    return Err(err(
                        TypeErrorKind::TypeMismatch,
                        "cannot infer the type of `none` here",
                    ))
                }
            },
            Expression::Empty(t) => {
                self.check_type_wellformed(t)?;
                match self.world.root(t) {
                    TypeExpr::Seq(_) | TypeExpr::Set(_) | TypeExpr::Map(_, _) => t.clone(),
                    _ => {
                        return Err(err(
                            TypeErrorKind::TypeMismatch,
                            format!("empty<{t}> is not a collection"),
                        ))
                    }
                }
            }
        })
    }

    /// A checker sharing this one's scope that emits nothing.
    fn quiet(&self) -> Checker<'w> {
        Checker {
            world: self.world,
            source: self.source.clone(),
            variables: self.variables.clone(),
            env: self.env.clone(),
            hyps: Vec::new(),
            subst: Vec::new(),
            obligations: Vec::new(),
            headers: self.headers.clone(),
            clique: Vec::new(),
            recursive_calls: Vec::new(),
            emit: false,
        }
    }

    /// Least common supertype of two compatible types.
    pub fn join(&self, a: &TypeExpr, b: &TypeExpr) -> Option<TypeExpr> {
        if self.world.is_subtype(a, b) {
            return Some(b.clone());
        }
        let mut up = a.clone();
        loop {
            if self.world.is_subtype(b, &up) {
                return Some(up);
            }
            match self.world.supertype(&up) {
                Some(s) => up = s.clone(),
                None => break,
            }
        }
        self.world.compatible(a, b).then(|| self.world.erase(a))
    }

    fn sum_alternative(
        &mut self,
        s: &Expression,
        alt: &Identifier,
    ) -> Result<crate::syntax::Alternative, TypeError> {
        let st = self.infer(s, None)?;
        let (_, alts) = self.world.sum_of(&st).ok_or_else(|| {
            err(
                TypeErrorKind::TypeMismatch,
                format!("`{s}` of type {st} is not a sum"),
            )
        })?;
        alts.iter()
            .find(|a| &a.name == alt)
            .cloned()
            .ok_or_else(|| {
                err(
                    TypeErrorKind::UnknownAlternative,
                    format!("no alternative {alt} in {st}"),
                )
            })
    }

    fn check_field_set(
        &self,
        ty: &Identifier,
        decl: &[TypedName],
        given: &[(Identifier, Expression)],
    ) -> Result<(), TypeError> {
        for (i, (n, _)) in given.iter().enumerate() {
            if given[..i].iter().any(|(m, _)| m == n) {
                return Err(err(
                    TypeErrorKind::DuplicateName,
                    format!("field {n} given twice"),
                ));
            }
            if !decl.iter().any(|d| &d.name == n) {
                return Err(err(
                    TypeErrorKind::UnknownField,
                    format!("no field {n} in {ty}"),
                ));
            }
        }
        if let Some(d) = decl
            .iter()
            .find(|d| !given.iter().any(|(n, _)| n == &d.name))
        {
            return Err(err(
                TypeErrorKind::UnknownField,
                format!("field {} of {ty} missing", d.name),
            ));
        }
        Ok(())
    }

    fn infer_binary(
        &mut self,
        e: &Expression,
        op: BinaryOp,
        l: &Expression,
        r: &Expression,
    ) -> Result<TypeExpr, TypeError> {
        use BinaryOp::*;
        Ok(match op {
            And | Or | Implies => {
                self.check_bool(l)?;
                let h = match op {
                    Or => Expression::not(l.clone()),
                    _ => l.clone(),
                };
                self.push_hypothesis(&h);
                let res = self.check_bool(r);
                self.pop_hypothesis();
                res?;
                TypeExpr::Bool
            }
            ImpliedBy => {
                self.check_bool(r)?;
                self.push_hypothesis(r);
                let res = self.check_bool(l);
                self.pop_hypothesis();
                res?;
                TypeExpr::Bool
            }
            Iff => {
                self.check_bool(l)?;
                self.check_bool(r)?;
                TypeExpr::Bool
            }
            Eq | Ne => {
                let (lt, rt) = if *l == Expression::None {
                    let rt = self.infer(r, None)?;
                    (self.infer(l, Some(&rt))?, rt)
                } else {
                    let lt = self.infer(l, None)?;
                    (lt.clone(), self.infer(r, Some(&lt))?)
                };
                if !self.world.compatible(&lt, &rt) {
                    return Err(mismatch(r, &lt, &rt));
                }
                TypeExpr::Bool
            }
            Lt | Le | Gt | Ge => {
                let lt = self.world.erase(&self.infer(l, None)?);
                if !matches!(lt, TypeExpr::Int | TypeExpr::Char | TypeExpr::String) {
                    return Err(mismatch(l, &TypeExpr::Int, &lt));
                }
                self.check_against(r, &lt)?;
                TypeExpr::Bool
            }
            Add | Sub | Mul | Div | Rem => {
                self.infer_int(l)?;
                self.infer_int(r)?;
                if matches!(op, Div | Rem) {
                    self.emit_obligation(
                        Provenance::PreconditionAtCall,
                        Expression::binary(Ne, r.clone(), Expression::int(0)),
                    );
                }
                let _ = e;
                TypeExpr::Int
            }
        })
    }

    fn collection(&mut self, e: &Expression) -> Result<TypeExpr, TypeError> {
        let t = self.infer(e, None)?;
        Ok(self.world.root(&t))
    }

    fn infer_call(&mut self, f: &Identifier, args: &[Expression]) -> Result<TypeExpr, TypeError> {
        if let Some(ty) = f.strip_prefix(HAS_TYPE) {
            let t = crate::syntax::parse_type(ty)
                .map_err(|_| err(TypeErrorKind::UnknownType, format!("bad type {ty}")))?;
            self.infer(&args[0], Some(&t))?;
            return Ok(TypeExpr::Bool);
        }
        if let Some(t) = self.infer_builtin(f, args)? {
            return Ok(t);
        }
        let header = if let Some(h) = self.headers.iter().find(|h| &h.name == f) {
            (h.clone(), None)
        } else if let Some(def) = self.world.function(f) {
            (def.header.clone(), def.precondition.clone())
        } else {
            return Err(err(
                TypeErrorKind::UnknownFunction,
                format!("unknown function {f}"),
            ));
        };
        let (header, pre) = header;
        if header.inputs.len() != args.len() {
            return Err(err(
                TypeErrorKind::Arity,
                format!(
                    "{f} takes {} arguments, given {}",
                    header.inputs.len(),
                    args.len()
                ),
            ));
        }
        for (a, p) in args.iter().zip(&header.inputs) {
            self.check_against(a, &p.ty)?;
        }
        let map: Vec<(Identifier, Expression)> = header
            .inputs
            .iter()
            .map(|p| p.name.clone())
            .zip(args.iter().cloned())
            .collect();
        if let Some(pre) = pre {
            self.emit_obligation(Provenance::PreconditionAtCall, pre.substitute(&map));
        }
        if self.clique.contains(f) {
            self.recursive_calls.push(RecursiveCall {
                callee: f.clone(),
                args: args.iter().map(|a| a.substitute(&self.subst)).collect(),
                hypotheses: self.hyps.clone(),
            });
        }
        Ok(header.result_type())
    }

    fn arity(&self, f: &str, args: &[Expression], n: usize) -> Result<(), TypeError> {
        if args.len() != n {
            return Err(err(
                TypeErrorKind::Arity,
                format!("{f} takes {n} arguments, given {}", args.len()),
            ));
        }
        Ok(())
    }

    fn not_collection(&self, f: &str, t: &TypeExpr) -> TypeError {
        err(TypeErrorKind::TypeMismatch, format!("{f} applied to {t}"))
    }

    fn infer_builtin(
        &mut self,
        f: &str,
        args: &[Expression],
    ) -> Result<Option<TypeExpr>, TypeError> {
        let nonempty =
            |s: &Expression| Expression::not(Expression::call("is_empty", vec![s.clone()]));
        Ok(Some(match f {
            "length" | "is_empty" => {
                self.arity(f, args, 1)?;
                let t = self.collection(&args[0])?;
                if !matches!(
                    t,
                    TypeExpr::Seq(_) | TypeExpr::Set(_) | TypeExpr::Map(_, _) | TypeExpr::String
                ) {
                    return Err(self.not_collection(f, &t));
                }
                if f == "length" {
                    TypeExpr::Int
                } else {
                    TypeExpr::Bool
                }
            }
            "first" | "rest" => {
                self.arity(f, args, 1)?;
                let t = self.infer(&args[0], None)?;
                let TypeExpr::Seq(elem) = self.world.root(&t) else {
                    return Err(self.not_collection(f, &t));
                };
                self.emit_obligation(Provenance::PreconditionAtCall, nonempty(&args[0]));
                if f == "first" {
                    *elem
                } else {
                    TypeExpr::Seq(elem)
                }
            }
            "member" => {
                self.arity(f, args, 2)?;
                let elem = match self.collection(&args[1])? {
                    TypeExpr::Seq(e) | TypeExpr::Set(e) | TypeExpr::Map(e, _) => *e,
                    t => return Err(self.not_collection(f, &t)),
                };
                let xt = self.infer(&args[0], Some(&elem))?;
                if !self.world.compatible(&xt, &elem) {
                    return Err(mismatch(&args[0], &elem, &xt));
                }
                TypeExpr::Bool
            }
            "add" | "remove" => {
                self.arity(f, args, 2)?;
                let t = self.infer(&args[0], None)?;
                let TypeExpr::Set(elem) = self.world.root(&t) else {
                    return Err(self.not_collection(f, &t));
                };
                self.check_against(&args[1], &elem)?;
                TypeExpr::Set(elem)
            }
            "get" | "put" | "keys" => {
                self.arity(
                    f,
                    args,
                    match f {
                        "get" => 2,
                        "put" => 3,
                        _ => 1,
                    },
                )?;
                let t = self.infer(&args[0], None)?;
                let TypeExpr::Map(k, v) = self.world.root(&t) else {
                    return Err(self.not_collection(f, &t));
                };
                match f {
                    "keys" => TypeExpr::Set(k),
                    "get" => {
                        self.check_against(&args[1], &k)?;
                        self.emit_obligation(
                            Provenance::PreconditionAtCall,
                            Expression::call("member", vec![args[1].clone(), args[0].clone()]),
                        );
                        *v
                    }
                    _ => {
                        self.check_against(&args[1], &k)?;
                        self.check_against(&args[2], &v)?;
                        TypeExpr::Map(k, v)
                    }
                }
            }
            "abs" => {
                self.arity(f, args, 1)?;
                self.infer_int(&args[0])?;
                TypeExpr::Int
            }
            "gcd" | "max" | "min" => {
                self.arity(f, args, 2)?;
                self.infer_int(&args[0])?;
                self.infer_int(&args[1])?;
                TypeExpr::Int
            }
            "prepend" | "append" => {
                self.arity(f, args, 2)?;
                let (s, x) = if f == "prepend" {
                    (&args[1], &args[0])
                } else {
                    (&args[0], &args[1])
                };
                let t = self.infer(s, None)?;
                let TypeExpr::Seq(elem) = self.world.root(&t) else {
                    return Err(self.not_collection(f, &t));
                };
                self.check_against(x, &elem)?;
                TypeExpr::Seq(elem)
            }
            "concat" => {
                self.arity(f, args, 2)?;
                let t = self.infer(&args[0], None)?;
                let root = self.world.root(&t);
                if !matches!(root, TypeExpr::Seq(_) | TypeExpr::String) {
                    return Err(self.not_collection(f, &t));
                }
                self.check_against(&args[1], &root)?;
                root
            }
            _ => return Ok(None),
        }))
    }
}
