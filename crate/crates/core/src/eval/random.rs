//! Random values of a type, and canonical witness candidates.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::syntax::{TypeBody, TypeExpr};
use crate::world::World;

use super::{EvalError, Evaluator, Value};

/// Attempts per value when a restriction or invariant rejects samples.
pub const REJECTION_LIMIT: usize = 1000;

const CANDIDATE_DEPTH: usize = 4;
const CANDIDATE_LIMIT: usize = 256;

fn mentions(t: &TypeExpr, names: &[crate::syntax::Identifier]) -> bool {
    match t {
        TypeExpr::Named(n) => names.contains(n),
        t => t.children().into_iter().any(|c| mentions(c, names)),
    }
}

/// A random value of `t`. Integers lie in `[-size, size]` and collections
/// hold at most `size` elements. Restricted types are rejection-sampled and
/// fall back to a witness.
pub fn random_value<R: Rng>(
    ev: &Evaluator,
    t: &TypeExpr,
    size: usize,
    rng: &mut R,
) -> Result<Value, EvalError> {
    Sampler::default().value(ev, t, size, rng)
}

/// Values of named types drawn for earlier elements of the same
/// collection, so that equalities between neighbours (connected edges,
/// repeated points) are hit at a useful rate.
#[derive(Default)]
pub struct Sampler {
    visible: Vec<(TypeExpr, Value)>,
    drawn: Vec<(TypeExpr, Value)>,
}

/// Chance of reusing the latest visible value of the same named type.
const REUSE_NUMERATOR: u32 = 1;
const REUSE_DENOMINATOR: u32 = 3;

impl Sampler {
    pub fn value<R: Rng>(
        &mut self,
        ev: &Evaluator,
        t: &TypeExpr,
        size: usize,
        rng: &mut R,
    ) -> Result<Value, EvalError> {
        if let TypeExpr::Named(_) = t {
            let latest = self.visible.iter().rev().find(|(u, _)| u == t);
            if let Some((_, v)) = latest {
                if rng.gen_ratio(REUSE_NUMERATOR, REUSE_DENOMINATOR) {
                    return Ok(v.clone());
                }
            }
            let v = self.fresh(ev, t, size, rng)?;
            self.drawn.push((t.clone(), v.clone()));
            return Ok(v);
        }
        self.fresh(ev, t, size, rng)
    }

    fn elements<R: Rng>(
        &mut self,
        ev: &Evaluator,
        t: &TypeExpr,
        n: usize,
        size: usize,
        rng: &mut R,
    ) -> Result<Vec<Value>, EvalError> {
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mark = self.drawn.len();
            out.push(self.value(ev, t, size, rng)?);
            self.visible.extend(self.drawn[mark..].iter().cloned());
        }
        Ok(out)
    }

    fn fresh<R: Rng>(
        &mut self,
        ev: &Evaluator,
        t: &TypeExpr,
        size: usize,
        rng: &mut R,
    ) -> Result<Value, EvalError> {
        let s = size as i64;
        Ok(match t {
            TypeExpr::Bool => Value::Bool(rng.gen_bool(0.5)),
            TypeExpr::Int => Value::int(rng.gen_range(-s..=s)),
            TypeExpr::Char => Value::Char(random_char(size, rng)),
            TypeExpr::String => {
                let n = rng.gen_range(0..=size);
                Value::String((0..n).map(|_| random_char(size, rng) as char).collect())
            }
            TypeExpr::Option(b) => {
                if rng.gen_ratio(1, 4) {
                    Value::Option(None)
                } else {
                    Value::Option(Some(Box::new(self.value(ev, b, size, rng)?)))
                }
            }
            TypeExpr::Seq(b) => {
                let n = length(size, rng);
                Value::Seq(self.elements(ev, b, n, size, rng)?)
            }
            TypeExpr::Set(b) => {
                let n = length(size, rng);
                Value::Set(self.elements(ev, b, n, size, rng)?.into_iter().collect())
            }
            TypeExpr::Map(d, r) => {
                let n = length(size, rng);
                let mut out = BTreeMap::new();
                for _ in 0..n {
                    let k = self.value(ev, d, size, rng)?;
                    out.insert(k, self.value(ev, r, size, rng)?);
                }
                Value::Map(out)
            }
            TypeExpr::Tuple(ts) => Value::Tuple(
                ts.iter()
                    .map(|t| self.value(ev, t, size, rng))
                    .collect::<Result<_, _>>()?,
            ),
            TypeExpr::Named(n) => {
                let world = ev.world();
                let entry = world
                    .types
                    .get(n)
                    .ok_or_else(|| EvalError::Unknown(format!("type {n}")))?;
                for _ in 0..REJECTION_LIMIT {
                    let candidate = match &entry.def.body {
                        TypeBody::Subtype { supertype, .. } => {
                            self.value(ev, supertype, size, rng)?
                        }
                        TypeBody::Product { fields, .. } => Value::Product {
                            ty: n.clone(),
                            fields: fields
                                .iter()
                                .map(|f| Ok((f.name.clone(), self.value(ev, &f.ty, size, rng)?)))
                                .collect::<Result<_, EvalError>>()?,
                        },
                        TypeBody::Sum { alternatives } => {
                            let recursive = |a: &crate::syntax::Alternative| {
                                a.fields.iter().any(|f| mentions(&f.ty, &entry.clique))
                            };
                            let pool: Vec<_> = if size == 0 {
                                alternatives.iter().filter(|a| !recursive(a)).collect()
                            } else {
                                alternatives.iter().collect()
                            };
                            let pool = if pool.is_empty() {
                                alternatives.iter().collect()
                            } else {
                                pool
                            };
                            let alt = pool[rng.gen_range(0..pool.len())];
                            let sub = if recursive(alt) { size / 2 } else { size };
                            Value::Sum {
                                ty: n.clone(),
                                alternative: alt.name.clone(),
                                fields: alt
                                    .fields
                                    .iter()
                                    .map(|f| Ok((f.name.clone(), self.value(ev, &f.ty, sub, rng)?)))
                                    .collect::<Result<_, EvalError>>()?,
                            }
                        }
                    };
                    if ev.has_type(&candidate, t)? {
                        return Ok(candidate);
                    }
                }
                witness(ev, t)?.ok_or_else(|| EvalError::Exhausted(t.to_string()))?
            }
        })
    }
}

/// Collection length: half the time uniform up to `size`, otherwise
/// geometric, so short collections, where structural hypotheses such as
/// connectedness mostly hold, are common.
fn length<R: Rng>(size: usize, rng: &mut R) -> usize {
    if rng.gen_bool(0.5) {
        return rng.gen_range(0..=size);
    }
    let mut n = 0;
    while n < size && rng.gen_bool(0.5) {
        n += 1;
    }
    n
}

fn random_char<R: Rng>(size: usize, rng: &mut R) -> u8 {
    b'a' + rng.gen_range(0..=size.min(25) as u8)
}

/// Canonical small values of a type, in preference order, unfiltered by
/// restrictions of the type itself.
pub fn candidates(world: &World, t: &TypeExpr, depth: usize) -> Vec<Value> {
    if depth == 0 {
        return Vec::new();
    }
    match t {
        TypeExpr::Int => vec![Value::int(0), Value::int(1), Value::int(-1)],
        TypeExpr::Bool => vec![Value::Bool(false), Value::Bool(true)],
        TypeExpr::Char => vec![Value::Char(b'a'), Value::Char(0)],
        TypeExpr::String => vec![Value::String(String::new())],
        TypeExpr::Option(_) => vec![Value::Option(None)],
        TypeExpr::Seq(_) => vec![Value::Seq(Vec::new())],
        TypeExpr::Set(_) => vec![Value::Set(BTreeSet::new())],
        TypeExpr::Map(_, _) => vec![Value::Map(BTreeMap::new())],
        TypeExpr::Tuple(ts) => combinations(world, ts.iter(), depth)
            .into_iter()
            .map(Value::Tuple)
            .collect(),
        TypeExpr::Named(n) => {
            let Some(def) = world.type_def(n) else {
                return Vec::new();
            };
            match &def.body {
                TypeBody::Subtype { supertype, .. } => {
                    let mut out: Vec<Value> = world.witnesses.get(n).cloned().into_iter().collect();
                    out.extend(candidates(world, supertype, depth));
                    out
                }
                TypeBody::Product { fields, .. } => {
                    combinations(world, fields.iter().map(|f| &f.ty), depth)
                        .into_iter()
                        .map(|vs| Value::Product {
                            ty: n.clone(),
                            fields: fields.iter().map(|f| f.name.clone()).zip(vs).collect(),
                        })
                        .collect()
                }
                TypeBody::Sum { alternatives } => {
                    let mut out = Vec::new();
                    for alt in alternatives {
                        for vs in combinations(world, alt.fields.iter().map(|f| &f.ty), depth) {
                            out.push(Value::Sum {
                                ty: n.clone(),
                                alternative: alt.name.clone(),
                                fields: alt.fields.iter().map(|f| f.name.clone()).zip(vs).collect(),
                            });
                        }
                    }
                    out.truncate(CANDIDATE_LIMIT);
                    out
                }
            }
        }
    }
}

fn combinations<'a>(
    world: &World,
    types: impl Iterator<Item = &'a TypeExpr>,
    depth: usize,
) -> Vec<Vec<Value>> {
    let mut acc: Vec<Vec<Value>> = vec![Vec::new()];
    for t in types {
        let cs = candidates(world, t, depth - 1);
        let mut next = Vec::new();
        'outer: for prefix in &acc {
            for c in &cs {
                let mut v = prefix.clone();
                v.push(c.clone());
                next.push(v);
                if next.len() >= CANDIDATE_LIMIT {
                    break 'outer;
                }
            }
        }
        acc = next;
    }
    acc
}

/// The first canonical candidate that is a member of `t`.
pub fn witness(ev: &Evaluator, t: &TypeExpr) -> Result<Option<Value>, EvalError> {
    for c in candidates(ev.world(), t, CANDIDATE_DEPTH) {
        match ev.has_type(&c, t) {
            Ok(true) => return Ok(Some(c)),
            Ok(false) | Err(EvalError::GuardViolation { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}
