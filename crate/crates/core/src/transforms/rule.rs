//! Conditional rewrite rules and their registration from theorems.

use std::fmt;

use crate::ir::backward::recognizer_type;
use crate::ir::{to_core_expr, CoreTerm};
use crate::syntax::{BinaryOp, Expression, Identifier, Theorem, TypeExpr};
use crate::world::World;

use super::TransformError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RuleOrigin {
    Theorem,
    Transform(String),
    Isodata,
}

/// `lhs` rewrites to `rhs` when every condition rewrites to true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub vars: Vec<String>,
    pub lhs: CoreTerm,
    pub rhs: CoreTerm,
    pub conditions: Vec<CoreTerm>,
    pub enabled: bool,
    pub origin: RuleOrigin,
}

impl Rule {
    /// Checks the variable discipline and builds the rule.
    pub fn new(
        name: &str,
        lhs: CoreTerm,
        rhs: CoreTerm,
        conditions: Vec<CoreTerm>,
        origin: RuleOrigin,
    ) -> Result<Rule, TransformError> {
        if matches!(lhs, CoreTerm::Var(_) | CoreTerm::Const(_)) {
            return Err(TransformError::NonOrientable(format!(
                "{name}: left-hand side {lhs} is not an application"
            )));
        }
        let vars = lhs.free_vars();
        for t in conditions.iter().chain(std::iter::once(&rhs)) {
            if let Some(v) = t.free_vars().into_iter().find(|v| !vars.contains(v)) {
                return Err(TransformError::NonOrientable(format!(
                    "{name}: variable {v} does not occur in {lhs}"
                )));
            }
        }
        Ok(Rule {
            name: name.to_string(),
            vars,
            lhs,
            rhs,
            conditions,
            enabled: true,
            origin,
        })
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(rule {} ({})", self.name, self.vars.join(" "))?;
        if !self.conditions.is_empty() {
            f.write_str(" :if (")?;
            for (i, c) in self.conditions.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        write!(f, " {} {})", self.lhs, self.rhs)
    }
}

const RELATIONS: &[&str] = &["<", "<=", ">", ">=", "/="];

/// Conjuncts of a core condition, without typing conjuncts.
pub fn condition_parts(t: &CoreTerm) -> Vec<CoreTerm> {
    t.conjuncts()
        .into_iter()
        .filter(|c| recognizer_type(c).is_none())
        .cloned()
        .collect()
}

/// Orients a theorem `h1 ==> ... ==> conclusion` into a rule.
pub fn theorem_rule(world: &World, th: &Theorem) -> Result<Rule, TransformError> {
    let env: Vec<(Identifier, TypeExpr)> = th
        .variables
        .iter()
        .map(|v| (v.name.clone(), v.ty.clone()))
        .collect();
    let core = |e: &Expression| to_core_expr(world, &env, e).map_err(TransformError::from);
    let mut conditions = Vec::new();
    let mut formula = &th.formula;
    while let Expression::Binary(BinaryOp::Implies, h, c) = formula {
        conditions.extend(condition_parts(&core(h)?));
        formula = c;
    }
    let conclusion = core(formula)?;
    let (lhs, rhs) = match &conclusion {
        CoreTerm::App(f, args) if (f == "equal" || f == "iff") && args.len() == 2 => {
            (args[0].clone(), args[1].clone())
        }
        CoreTerm::App(f, args) if f == "not" => (args[0].clone(), CoreTerm::nil()),
        CoreTerm::App(f, _) if RELATIONS.contains(&f.as_str()) => {
            return Err(TransformError::NonOrientable(format!(
                "{}: conclusion {conclusion} is not an equality",
                th.name
            )))
        }
        other => (other.clone(), CoreTerm::t()),
    };
    Rule::new(th.name.as_str(), lhs, rhs, conditions, RuleOrigin::Theorem)
}

/// Rules a theorem contributes; theorems that cannot be oriented
/// contribute none.
pub fn theorem_rules(world: &World, th: &Theorem) -> Vec<Rule> {
    theorem_rule(world, th).into_iter().collect()
}

/// Binds pattern variables so that `pat` equals `t`.
pub fn match_term(
    pat: &CoreTerm,
    t: &CoreTerm,
    vars: &[String],
    b: &mut Vec<(String, CoreTerm)>,
) -> bool {
    match pat {
        CoreTerm::Var(v) if vars.contains(v) => match b.iter().find(|(k, _)| k == v) {
            Some((_, bound)) => bound == t,
            None => {
                b.push((v.clone(), t.clone()));
                true
            }
        },
        CoreTerm::App(f, ps) => match t {
            CoreTerm::App(g, ts) if f == g && ps.len() == ts.len() => {
                ps.iter().zip(ts).all(|(p, x)| match_term(p, x, vars, b))
            }
            _ => false,
        },
        CoreTerm::If(pc, pa, pb) => match t {
            CoreTerm::If(c, a, bb) => {
                match_term(pc, c, vars, b)
                    && match_term(pa, a, vars, b)
                    && match_term(pb, bb, vars, b)
            }
            _ => false,
        },
        other => other == t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;
    use crate::syntax::TopLevel;

    fn theorem(src: &str) -> Theorem {
        match parse_program(src).unwrap().remove(0) {
            TopLevel::Theorem(t) => t,
            _ => panic!(),
        }
    }

    #[test]
    fn identity_orients_left_to_right() {
        let r = theorem_rule(
            &World::new(),
            &theorem("theorem plus_zero forall(x: int) x + 0 == x"),
        )
        .unwrap();
        assert_eq!(r.lhs.to_string(), "(+ x 0)");
        assert_eq!(r.rhs.to_string(), "x");
        assert!(r.conditions.is_empty());
    }

    #[test]
    fn inequality_is_not_orientable() {
        let e = theorem_rule(
            &World::new(),
            &theorem("theorem lt forall(x: int) x < x + 1"),
        )
        .unwrap_err();
        assert!(matches!(e, TransformError::NonOrientable(_)));
    }

    #[test]
    fn negated_conclusion_rewrites_to_false() {
        let th = theorem("theorem ne forall(s: seq<int>) length(s) > 0 ==> !is_empty(s)");
        let r = theorem_rule(&World::new(), &th).unwrap();
        assert_eq!(
            r.to_string(),
            "(rule ne (s) :if ((> (len s) 0)) (endp s) nil)"
        );
    }

    #[test]
    fn matching_binds_consistently() {
        let pat = CoreTerm::app("+", vec![CoreTerm::var("x"), CoreTerm::var("x")]);
        let vars = vec!["x".to_string()];
        let mut b = Vec::new();
        let t = CoreTerm::app("+", vec![CoreTerm::var("a"), CoreTerm::var("a")]);
        assert!(match_term(&pat, &t, &vars, &mut b));
        let mut b = Vec::new();
        let u = CoreTerm::app("+", vec![CoreTerm::var("a"), CoreTerm::var("c")]);
        assert!(!match_term(&pat, &u, &vars, &mut b));
    }
}
