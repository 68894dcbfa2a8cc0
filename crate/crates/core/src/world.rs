//! The world: everything accepted so far.
//!
//! Worlds are plain values. Processing a unit clones the world, extends the
//! copy, and the caller decides whether to keep it.

use std::collections::HashMap;

use indexmap::IndexMap;

use crate::eval::Value;
use crate::ir::CoreDef;
use crate::syntax::{
    Alternative, Expression, FunctionDefinition, Identifier, Specification, Theorem, TopLevel,
    TypeBody, TypeDefinition, TypeExpr, TypedName,
};
use crate::transforms::Rule;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    User,
    /// Produced by `transform` from the function `source`.
    Derived {
        transform: String,
        source: Identifier,
    },
}

#[derive(Clone, Debug)]
pub struct TypeEntry {
    pub def: TypeDefinition,
    /// Every type of the declaring clique, in declaration order.
    pub clique: Vec<Identifier>,
}

#[derive(Clone, Debug)]
pub struct FunctionEntry {
    pub def: FunctionDefinition,
    pub clique: Vec<Identifier>,
    pub origin: Origin,
    pub executable: bool,
    /// Termination measure of recursive functions, over the parameters.
    pub measure: Option<Expression>,
}

#[derive(Clone, Debug, Default)]
pub struct World {
    pub types: IndexMap<Identifier, TypeEntry>,
    pub functions: IndexMap<Identifier, FunctionEntry>,
    pub specifications: IndexMap<Identifier, Specification>,
    pub theorems: IndexMap<Identifier, Theorem>,
    /// Parameterized type instances, each registered once, components first.
    pub instances: Vec<TypeExpr>,
    pub witnesses: HashMap<Identifier, Value>,
    pub core: IndexMap<String, CoreDef>,
    pub rules: Vec<Rule>,
    /// Accepted units in order, derived definitions included.
    pub units: Vec<TopLevel>,
}

impl World {
    pub fn new() -> Self {
        World::default()
    }

    pub fn is_defined(&self, name: &str) -> bool {
        self.types.contains_key(name)
            || self.functions.contains_key(name)
            || self.specifications.contains_key(name)
            || self.theorems.contains_key(name)
    }

    pub fn type_def(&self, name: &str) -> Option<&TypeDefinition> {
        self.types.get(name).map(|e| &e.def)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDefinition> {
        self.functions.get(name).map(|e| &e.def)
    }

    pub fn in_same_clique(&self, caller: &str, callee: &str) -> bool {
        self.functions
            .get(caller)
            .is_some_and(|e| e.clique.iter().any(|c| c.as_str() == callee))
    }

    /// The supertype of a named subtype.
    pub fn supertype(&self, t: &TypeExpr) -> Option<&TypeExpr> {
        match t {
            TypeExpr::Named(n) => match &self.type_def(n)?.body {
                TypeBody::Subtype { supertype, .. } => Some(supertype),
                _ => None,
            },
            _ => None,
        }
    }

    /// Replaces every named subtype by its root supertype.
    pub fn erase(&self, t: &TypeExpr) -> TypeExpr {
        match t {
            TypeExpr::Named(_) => match self.supertype(t) {
                Some(s) => self.erase(s),
                None => t.clone(),
            },
            TypeExpr::Option(b) => TypeExpr::Option(Box::new(self.erase(b))),
            TypeExpr::Set(b) => TypeExpr::Set(Box::new(self.erase(b))),
            TypeExpr::Seq(b) => TypeExpr::Seq(Box::new(self.erase(b))),
            TypeExpr::Map(d, r) => TypeExpr::Map(Box::new(self.erase(d)), Box::new(self.erase(r))),
            TypeExpr::Tuple(ts) => TypeExpr::Tuple(ts.iter().map(|t| self.erase(t)).collect()),
            _ => t.clone(),
        }
    }

    /// Unfolds named subtypes at the top only.
    pub fn root(&self, t: &TypeExpr) -> TypeExpr {
        let mut t = t.clone();
        while let Some(s) = self.supertype(&t) {
            t = s.clone();
        }
        t
    }

    /// Every value of `a` is a value of `b`, with no check needed.
    pub fn is_subtype(&self, a: &TypeExpr, b: &TypeExpr) -> bool {
        if a == b {
            return true;
        }
        if let Some(s) = self.supertype(a) {
            if self.is_subtype(s, b) {
                return true;
            }
        }
        match (a, b) {
            (TypeExpr::Option(x), TypeExpr::Option(y))
            | (TypeExpr::Set(x), TypeExpr::Set(y))
            | (TypeExpr::Seq(x), TypeExpr::Seq(y)) => self.is_subtype(x, y),
            (TypeExpr::Map(d1, r1), TypeExpr::Map(d2, r2)) => {
                self.is_subtype(d1, d2) && self.is_subtype(r1, r2)
            }
            (TypeExpr::Tuple(xs), TypeExpr::Tuple(ys)) => {
                xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| self.is_subtype(x, y))
            }
            _ => false,
        }
    }

    /// Values of `a` may be values of `b`: they share a root.
    pub fn compatible(&self, a: &TypeExpr, b: &TypeExpr) -> bool {
        self.erase(a) == self.erase(b)
    }

    /// The product a type denotes, looking through subtypes.
    pub fn product_of(
        &self,
        t: &TypeExpr,
    ) -> Option<(&Identifier, &[TypedName], Option<&Expression>)> {
        match self.root(t) {
            TypeExpr::Named(n) => {
                let (name, entry) = self.types.get_key_value(&n)?;
                match &entry.def.body {
                    TypeBody::Product { fields, invariant } => {
                        Some((name, fields.as_slice(), invariant.as_ref()))
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn sum_of(&self, t: &TypeExpr) -> Option<(&Identifier, &[Alternative])> {
        match self.root(t) {
            TypeExpr::Named(n) => {
                let (name, entry) = self.types.get_key_value(&n)?;
                match &entry.def.body {
                    TypeBody::Sum { alternatives } => Some((name, alternatives.as_slice())),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    pub fn product_fields(&self, name: &str) -> Option<&[TypedName]> {
        match &self.type_def(name)?.body {
            TypeBody::Product { fields, .. } => Some(fields),
            _ => None,
        }
    }

    pub fn alternative(&self, ty: &str, alt: &str) -> Option<&Alternative> {
        match &self.type_def(ty)?.body {
            TypeBody::Sum { alternatives } => alternatives.iter().find(|a| a.name.as_str() == alt),
            _ => None,
        }
    }

    /// Accepted units printed one per paragraph, followed by core
    /// definitions; two worlds built from the same units agree on this text.
    pub fn canonical_text(&self) -> String {
        let mut out = crate::syntax::print_program(&self.units);
        out.push('\n');
        for def in self.core.values() {
            out.push_str(&def.to_string());
            out.push('\n');
        }
        for rule in &self.rules {
            out.push_str(&rule.to_string());
            out.push('\n');
        }
        out
    }
}
