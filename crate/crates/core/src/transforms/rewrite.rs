//! Leftmost-innermost conditional rewriting under contextual facts.
//!
//! At each application node, after its arguments are normalized, the
//! rewriter tries in order: known facts, ground evaluation, the world's
//! rules (theorems first, then transformation rules, in registration
//! order), extra rules supplied by the caller, unfolding of small enabled
//! definitions, and builtin simplifications.

use crate::eval::Value;
use crate::ir::backward::recognizer_type;
use crate::ir::mangle::CoreName;
use crate::ir::{CoreEvaluator, CoreTerm};
use crate::world::World;

use super::rule::{condition_parts, match_term, Rule};

pub const DEFAULT_FUEL: usize = 10_000;
/// Definitions whose body has at most this many nodes are unfolded.
pub const AUTO_ENABLE_SIZE: usize = 8;
const CONDITION_DEPTH: usize = 6;

/// A boolean term known to have a value on the current path.
type Facts = Vec<(CoreTerm, bool)>;

pub struct Rewriter<'w> {
    world: &'w World,
    extra: Vec<Rule>,
    pub fuel: usize,
    pub exhausted: bool,
    /// Distribute applications over conditional arguments.
    pub lift_ifs: bool,
    pub unfold: bool,
    depth: usize,
    steps: usize,
}

impl<'w> Rewriter<'w> {
    pub fn new(world: &'w World) -> Self {
        Rewriter {
            world,
            extra: Vec::new(),
            fuel: DEFAULT_FUEL,
            exhausted: false,
            lift_ifs: false,
            unfold: true,
            depth: 0,
            steps: 0,
        }
    }

    pub fn with_rules(mut self, rules: Vec<Rule>) -> Self {
        self.extra = rules;
        self
    }

    /// Rule applications performed so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Normalizes `t` assuming every term in `assumptions` is true.
    pub fn rewrite(&mut self, t: &CoreTerm, assumptions: &[CoreTerm]) -> CoreTerm {
        let mut facts = Vec::new();
        for a in assumptions {
            assume(&mut facts, a, true);
        }
        self.norm(t, &mut facts)
    }

    fn norm(&mut self, t: &CoreTerm, facts: &mut Facts) -> CoreTerm {
        stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, || self.norm_node(t, facts))
    }

    fn norm_node(&mut self, t: &CoreTerm, facts: &mut Facts) -> CoreTerm {
        match t {
            CoreTerm::Const(_)
            | CoreTerm::Primitive
            | CoreTerm::Quant { .. }
            | CoreTerm::Assume(_) => t.clone(),
            CoreTerm::Var(_) => match lookup(facts, t) {
                Some(b) => CoreTerm::Const(Value::Bool(b)),
                None => t.clone(),
            },
            CoreTerm::If(c, a, b) => {
                let c = self.norm(c, facts);
                if c.is_true() {
                    return self.norm(a, facts);
                }
                if c.is_false() {
                    return self.norm(b, facts);
                }
                let n = facts.len();
                assume(facts, &c, true);
                let a = self.norm(a, facts);
                facts.truncate(n);
                assume(facts, &c, false);
                let b = self.norm(b, facts);
                facts.truncate(n);
                if a == b {
                    a
                } else {
                    CoreTerm::ite(c, a, b)
                }
            }
            CoreTerm::Let(bs, body) => {
                let bs: Vec<_> = bs
                    .iter()
                    .map(|b| crate::ir::CoreBinding {
                        name: b.name.clone(),
                        ty: b.ty.clone(),
                        value: self.norm(&b.value, facts),
                    })
                    .collect();
                let mut inner: Facts = facts
                    .iter()
                    .filter(|(f, _)| !bs.iter().any(|b| f.mentions_var(&b.name)))
                    .cloned()
                    .collect();
                let body = self.norm(body, &mut inner);
                CoreTerm::Let(bs, Box::new(body))
            }
            CoreTerm::App(f, args) => {
                let args = self.norm_args(f, args, facts);
                let node = CoreTerm::App(f.clone(), args);
                self.step(node, facts)
            }
        }
    }

    fn norm_args(&mut self, f: &str, args: &[CoreTerm], facts: &mut Facts) -> Vec<CoreTerm> {
        // later operands of and/or/implies see the earlier ones
        let polarity = match f {
            "and" | "implies" => Some(true),
            "or" => Some(false),
            _ => None,
        };
        let n = facts.len();
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            let a = self.norm(a, facts);
            if let Some(p) = polarity {
                assume(facts, &a, p);
            }
            out.push(a);
        }
        facts.truncate(n);
        out
    }

    fn step(&mut self, t: CoreTerm, facts: &mut Facts) -> CoreTerm {
        if let Some(b) = lookup(facts, &t) {
            return CoreTerm::Const(Value::Bool(b));
        }
        if self.fuel == 0 {
            self.exhausted = true;
            return t;
        }
        let next = self
            .ground(&t)
            .or_else(|| self.apply_rules(&t, facts))
            .or_else(|| self.unfold_small(&t, facts))
            .or_else(|| simplify_builtin(self.world, &t))
            .or_else(|| if self.lift_ifs { lift_if(&t) } else { None });
        match next {
            Some(n) => {
                self.fuel -= 1;
                self.steps += 1;
                self.norm(&n, facts)
            }
            None => t,
        }
    }

    fn ground(&self, t: &CoreTerm) -> Option<CoreTerm> {
        let CoreTerm::App(f, args) = t else {
            return None;
        };
        if args.is_empty() {
            return None;
        }
        let vals: Vec<Value> = args
            .iter()
            .map(|a| a.as_const().cloned())
            .collect::<Option<_>>()?;
        if self
            .world
            .core
            .get(f.as_str())
            .is_some_and(|d| d.is_primitive())
            && !matches!(CoreName::demangle(f), Some(CoreName::Recognizer(_)))
        {
            return None;
        }
        let v = CoreEvaluator::new(self.world).call(f, vals).ok()?;
        matches!(
            v,
            Value::Bool(_) | Value::Int(_) | Value::Char(_) | Value::String(_)
        )
        .then_some(CoreTerm::Const(v))
    }

    fn apply_rules(&mut self, t: &CoreTerm, facts: &mut Facts) -> Option<CoreTerm> {
        let world = self.world;
        let n_world = world.rules.len();
        for i in 0..n_world + self.extra.len() {
            let rule = if i < n_world {
                &world.rules[i]
            } else {
                &self.extra[i - n_world]
            };
            if !rule.enabled {
                continue;
            }
            let mut b = Vec::new();
            if !match_term(&rule.lhs, t, &rule.vars, &mut b) {
                continue;
            }
            let conditions: Vec<CoreTerm> =
                rule.conditions.iter().map(|c| c.substitute(&b)).collect();
            let rhs = rule.rhs.substitute(&b);
            if self.prove_all(&conditions, facts) {
                return Some(rhs);
            }
        }
        None
    }

    /// Each condition rewrites to true, within a bounded nesting depth.
    fn prove_all(&mut self, conditions: &[CoreTerm], facts: &mut Facts) -> bool {
        if conditions.is_empty() {
            return true;
        }
        if self.depth >= CONDITION_DEPTH {
            return false;
        }
        self.depth += 1;
        let saved = self.lift_ifs;
        self.lift_ifs = false;
        let ok = conditions.iter().all(|c| self.norm(c, facts).is_true());
        self.lift_ifs = saved;
        self.depth -= 1;
        ok
    }

    fn unfold_small(&mut self, t: &CoreTerm, facts: &mut Facts) -> Option<CoreTerm> {
        if !self.unfold {
            return None;
        }
        let CoreTerm::App(f, args) = t else {
            return None;
        };
        let def = self.world.core.get(f.as_str())?;
        if def.is_primitive()
            || def.is_recursive()
            || matches!(def.inner, CoreTerm::Quant { .. })
            || def.inner.size() > AUTO_ENABLE_SIZE
            || def.params.len() != args.len()
        {
            return None;
        }
        let map: Vec<(String, CoreTerm)> = def
            .params
            .iter()
            .cloned()
            .zip(args.iter().cloned())
            .collect();
        let conditions: Vec<CoreTerm> = condition_parts(&def.guard)
            .iter()
            .map(|c| c.substitute(&map))
            .collect();
        if !self.prove_all(&conditions, facts) {
            return None;
        }
        Some(def.inner.substitute(&map))
    }
}

fn lookup(facts: &Facts, t: &CoreTerm) -> Option<bool> {
    facts.iter().rev().find(|(f, _)| f == t).map(|(_, b)| *b)
}

/// Records that `t` has value `value`, splitting conjunctions,
/// disjunctions and negations.
fn assume(facts: &mut Facts, t: &CoreTerm, value: bool) {
    match t {
        CoreTerm::Const(_) => {}
        CoreTerm::App(f, args) if f == "not" && args.len() == 1 => assume(facts, &args[0], !value),
        CoreTerm::App(f, args) if f == "and" && value => {
            for a in args {
                assume(facts, a, true);
            }
        }
        CoreTerm::App(f, args) if f == "or" && !value => {
            for a in args {
                assume(facts, a, false);
            }
        }
        _ => facts.push((t.clone(), value)),
    }
}

fn boolean(b: bool) -> CoreTerm {
    CoreTerm::Const(Value::Bool(b))
}

fn is_int(t: &CoreTerm, n: i64) -> bool {
    matches!(t, CoreTerm::Const(Value::Int(k)) if *k == n.into())
}

/// Identities of the builtin operators and type-support functions.
pub fn simplify_builtin(world: &World, t: &CoreTerm) -> Option<CoreTerm> {
    let CoreTerm::App(f, args) = t else {
        return None;
    };
    if recognizer_type(t).is_some() {
        // typing expressions are true in a guarded context
        return Some(CoreTerm::t());
    }
    match (f.as_str(), args.as_slice()) {
        ("not", [a]) => match a {
            CoreTerm::Const(Value::Bool(b)) => Some(boolean(!b)),
            CoreTerm::App(g, inner) if g == "not" && inner.len() == 1 => Some(inner[0].clone()),
            _ => None,
        },
        ("and", _) | ("or", _) => {
            let unit = f == "and";
            if args
                .iter()
                .any(|a| a.as_const() == Some(&Value::Bool(!unit)))
            {
                return Some(boolean(!unit));
            }
            if args
                .iter()
                .any(|a| a.as_const() == Some(&Value::Bool(unit)))
            {
                let rest: Vec<CoreTerm> = args
                    .iter()
                    .filter(|a| a.as_const() != Some(&Value::Bool(unit)))
                    .cloned()
                    .collect();
                return Some(match rest.len() {
                    0 => boolean(unit),
                    1 => rest.into_iter().next().expect("one"),
                    _ => CoreTerm::App(f.clone(), rest),
                });
            }
            None
        }
        ("implies", [a, b]) => {
            if a.is_false() || b.is_true() {
                Some(CoreTerm::t())
            } else if a.is_true() {
                Some(b.clone())
            } else {
                None
            }
        }
        ("+", [a, b]) if is_int(a, 0) => Some(b.clone()),
        ("+", [a, b]) if is_int(b, 0) => Some(a.clone()),
        ("-", [a, b]) if is_int(b, 0) => Some(a.clone()),
        ("*", [a, b]) if is_int(a, 1) => Some(b.clone()),
        ("*", [a, b]) if is_int(b, 1) => Some(a.clone()),
        ("equal", [a, b]) if a == b => Some(CoreTerm::t()),
        ("iff", [a, b]) if a == b => Some(CoreTerm::t()),
        (_, [CoreTerm::App(g, fields)]) => match (CoreName::demangle(f)?, CoreName::demangle(g)?) {
            (CoreName::Accessor(t1, field), CoreName::Constructor(t2)) if t1 == t2 => {
                let decl = world.product_fields(&t1)?;
                let i = decl.iter().position(|d| d.name == field)?;
                fields.get(i).cloned()
            }
            _ => None,
        },
        _ => None,
    }
}

/// `f(.., if(c, a, b), ..)` to `if(c, f(.., a, ..), f(.., b, ..))`.
pub fn lift_if(t: &CoreTerm) -> Option<CoreTerm> {
    let CoreTerm::App(f, args) = t else {
        return None;
    };
    let i = args.iter().position(|a| matches!(a, CoreTerm::If(..)))?;
    let CoreTerm::If(c, a, b) = &args[i] else {
        unreachable!()
    };
    let with = |x: &CoreTerm| {
        let mut v = args.clone();
        v[i] = x.clone();
        CoreTerm::App(f.clone(), v)
    };
    Some(CoreTerm::ite((**c).clone(), with(a), with(b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::CoreOrigin;

    fn parse(s: &str) -> CoreTerm {
        s.parse().unwrap()
    }

    #[test]
    fn additive_identity() {
        let w = World::new();
        let r = Rule::new(
            "plus_zero",
            parse("(+ 0 x)"),
            parse("x"),
            vec![],
            super::super::rule::RuleOrigin::Theorem,
        )
        .unwrap();
        let mut rw = Rewriter::new(&w).with_rules(vec![r]);
        assert_eq!(rw.rewrite(&parse("(+ 0 count)"), &[]), parse("count"));
    }

    #[test]
    fn no_rule_is_fixpoint() {
        let w = World::new();
        let t = parse("(f (g x) y)");
        assert_eq!(Rewriter::new(&w).rewrite(&t, &[]), t);
    }

    #[test]
    fn branch_facts_decide_tests() {
        let w = World::new();
        let t = parse("(if (endp s) 0 (if (endp s) 1 2))");
        assert_eq!(
            Rewriter::new(&w).rewrite(&t, &[]).to_string(),
            "(if (endp s) 0 2)"
        );
    }

    #[test]
    fn conditions_must_be_proved() {
        let w = World::new();
        let r = Rule::new(
            "r",
            parse("(f x)"),
            parse("x"),
            vec![parse("(p x)")],
            super::super::rule::RuleOrigin::Theorem,
        )
        .unwrap();
        let mut rw = Rewriter::new(&w).with_rules(vec![r.clone()]);
        assert_eq!(rw.rewrite(&parse("(f a)"), &[]), parse("(f a)"));
        let mut rw = Rewriter::new(&w).with_rules(vec![r]);
        assert_eq!(rw.rewrite(&parse("(f a)"), &[parse("(p a)")]), parse("a"));
    }

    #[test]
    fn lifting_distributes() {
        let t = parse("(odd (+ (if c 1 0) n))");
        let w = World::new();
        let mut rw = Rewriter::new(&w);
        rw.lift_ifs = true;
        assert_eq!(
            rw.rewrite(&t, &[]).to_string(),
            "(if c (odd (+ 1 n)) (odd n))"
        );
        let _ = CoreOrigin::User;
    }

    #[test]
    fn fuel_bounds_looping_rules() {
        let w = World::new();
        let r = Rule::new(
            "swap",
            parse("(f x y)"),
            parse("(f y x)"),
            vec![],
            super::super::rule::RuleOrigin::Theorem,
        )
        .unwrap();
        let mut rw = Rewriter::new(&w).with_rules(vec![r]);
        rw.fuel = 50;
        rw.rewrite(&parse("(f a b)"), &[]);
        assert!(rw.exhausted);
    }
}
