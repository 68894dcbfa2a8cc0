//! Transformations over core definitions.
//!
//! Each transformation reads the target's [`CoreDef`], builds the new
//! definition, a rule rewriting calls of the target into calls of the new
//! function, and the obligations under which the two agree. Nothing is
//! committed here; the pipeline tests the obligations first.

pub mod rewrite;
pub mod rule;
pub mod schema;

pub use rewrite::{lift_if, simplify_builtin, Rewriter, AUTO_ENABLE_SIZE, DEFAULT_FUEL};
pub use rule::{match_term, theorem_rule, theorem_rules, Rule, RuleOrigin};
pub use schema::{schema, OptionKind, OptionSpec, Options, Schema, SCHEMAS};

use crate::eval::{candidates, Value};
use crate::ir::backward::recognizer_type;
use crate::ir::forward::recognize;
use crate::ir::{from_core_expr, to_core_expr, CoreDef, CoreOrigin, CoreTerm, IrError};
use crate::syntax::{
    BinaryOp, Expression, FunctionDefinition, Identifier, TransformInvocation, TypeExpr, TypedName,
};
use crate::typecheck::{Checker, Obligation, Provenance, TypeError};
use crate::world::World;

use rule::condition_parts;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TransformError {
    #[error("unknown transformation {0}")]
    UnknownTransform(String),
    #[error("unknown function {0}")]
    UnknownFunction(String),
    #[error("missing option: {0}")]
    MissingOption(String),
    #[error("bad option: {0}")]
    BadOption(String),
    #[error("name clash: {0}")]
    NameClash(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("fold failure: {0}")]
    FoldFailure(String),
    #[error("irrelevance check failed: {0}")]
    NotIrrelevant(String),
    #[error("non-orientable theorem: {0}")]
    NonOrientable(String),
    #[error("rewriting ran out of fuel in {0}")]
    FuelExhausted(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

impl From<TypeError> for TransformError {
    fn from(e: TypeError) -> Self {
        TransformError::Ir(IrError::Type(e))
    }
}

#[derive(Clone, Debug)]
pub struct TransformResult {
    pub def: CoreDef,
    pub obligations: Vec<Obligation>,
    pub rules: Vec<Rule>,
    pub report: String,
}

/// Associative, commutative operators accepted by `tail_recursion`.
pub const COMBINE_OPERATORS: &[(&str, BinaryOp)] = &[
    ("+", BinaryOp::Add),
    ("*", BinaryOp::Mul),
    ("and", BinaryOp::And),
    ("or", BinaryOp::Or),
];

fn identity(op: &str) -> (CoreTerm, Expression) {
    match op {
        "+" => (CoreTerm::int(0), Expression::int(0)),
        "*" => (CoreTerm::int(1), Expression::int(1)),
        "and" => (CoreTerm::t(), Expression::bool(true)),
        _ => (CoreTerm::nil(), Expression::bool(false)),
    }
}

fn surface_op(op: &str) -> BinaryOp {
    COMBINE_OPERATORS
        .iter()
        .find(|(o, _)| *o == op)
        .map(|(_, b)| *b)
        .expect("registered operator")
}

/// Target of a transformation and what the transformations need of it.
struct Target<'w> {
    world: &'w World,
    core: &'w CoreDef,
    surface: &'w FunctionDefinition,
    new_name: String,
}

impl<'w> Target<'w> {
    fn new(world: &'w World, inv: &TransformInvocation) -> Result<Target<'w>, TransformError> {
        let name = inv.target.as_str();
        let surface = world
            .function(name)
            .ok_or_else(|| TransformError::UnknownFunction(name.to_string()))?;
        let core = world
            .core
            .get(name)
            .ok_or_else(|| TransformError::UnknownFunction(name.to_string()))?;
        if matches!(core.inner, CoreTerm::Quant { .. }) {
            return Err(TransformError::ShapeMismatch(format!(
                "{name} is not executable"
            )));
        }
        if world.is_defined(&inv.new_name) {
            return Err(TransformError::NameClash(format!(
                "{} is already defined",
                inv.new_name
            )));
        }
        Ok(Target {
            world,
            core,
            surface,
            new_name: inv.new_name.to_string(),
        })
    }

    fn name(&self) -> &str {
        &self.core.name
    }

    fn params(&self) -> &[TypedName] {
        &self.surface.header.inputs
    }

    fn param_index(&self, p: &Identifier) -> Result<usize, TransformError> {
        self.core
            .params
            .iter()
            .position(|x| x == p.as_str())
            .ok_or_else(|| {
                TransformError::BadOption(format!("{} has no parameter {p}", self.name()))
            })
    }

    fn env(&self) -> Vec<(Identifier, TypeExpr)> {
        self.params()
            .iter()
            .map(|p| (p.name.clone(), p.ty.clone()))
            .collect()
    }

    fn guard_parts(&self) -> Vec<CoreTerm> {
        condition_parts(&self.core.guard)
    }

    fn param_vars(&self) -> Vec<CoreTerm> {
        self.core.params.iter().map(|p| CoreTerm::var(p)).collect()
    }

    fn call(&self) -> CoreTerm {
        CoreTerm::App(self.core.name.clone(), self.param_vars())
    }

    fn surface_args(&self) -> Vec<Expression> {
        self.params()
            .iter()
            .map(|p| Expression::Variable(p.name.clone()))
            .collect()
    }

    fn surface_call(&self, name: &str, args: Vec<Expression>) -> Expression {
        Expression::Call(Identifier::from(name), args)
    }

    fn new_surface_call(&self, args: Vec<Expression>) -> Expression {
        self.surface_call(&self.new_name, args)
    }

    fn old_surface_call(&self) -> Expression {
        self.surface_call(self.name(), self.surface_args())
    }

    /// A copy of the target under the new name, recursive calls renamed.
    fn derived(&self, transform: &str) -> CoreDef {
        let mut d = self.core.clone();
        d.name = self.new_name.clone();
        d.inner = rename_calls(&self.core.inner, self.name(), &self.new_name);
        d.clique = vec![self.new_name.clone()];
        d.postcondition = None;
        d.origin = CoreOrigin::Transform(transform.to_string());
        d
    }

    fn rule(
        &self,
        transform: &str,
        rhs: CoreTerm,
        mut extra: Vec<CoreTerm>,
    ) -> Result<Rule, TransformError> {
        let mut conditions = self.guard_parts();
        conditions.append(&mut extra);
        Rule::new(
            &format!("{}-to-{}", self.name(), self.new_name),
            self.call(),
            rhs,
            conditions,
            RuleOrigin::Transform(transform.to_string()),
        )
    }

    fn obligation(
        &self,
        variables: Vec<TypedName>,
        mut hypotheses: Vec<Expression>,
        conclusion: Expression,
    ) -> Obligation {
        hypotheses.retain(|h| *h != Expression::bool(true));
        Obligation {
            provenance: Provenance::TransformCorrectness,
            source: Identifier::from(self.new_name.as_str()),
            variables,
            hypotheses,
            conclusion,
        }
    }

    fn precondition(&self) -> Vec<Expression> {
        self.surface.precondition.iter().cloned().collect()
    }

    fn simplify(
        &self,
        t: &CoreTerm,
        facts: &[CoreTerm],
        extra: Vec<Rule>,
    ) -> Result<CoreTerm, TransformError> {
        let mut rw = Rewriter::new(self.world).with_rules(extra);
        let out = rw.rewrite(t, facts);
        if rw.exhausted {
            return Err(TransformError::FuelExhausted(self.new_name.clone()));
        }
        Ok(out)
    }

    fn back(
        &self,
        env: &[(Identifier, TypeExpr)],
        t: &CoreTerm,
    ) -> Result<Expression, TransformError> {
        Ok(from_core_expr(self.world, env, t)?)
    }
}

fn eq(a: Expression, b: Expression) -> Expression {
    Expression::binary(BinaryOp::Eq, a, b)
}

/// Renames the head of every call of `from`.
pub fn rename_calls(t: &CoreTerm, from: &str, to: &str) -> CoreTerm {
    match t {
        CoreTerm::App(f, args) => CoreTerm::App(
            if f == from { to.to_string() } else { f.clone() },
            args.iter().map(|a| rename_calls(a, from, to)).collect(),
        ),
        t => t.map_children(|c| rename_calls(c, from, to)),
    }
}

/// Rewrites every call of `f`, innermost first.
fn map_calls(t: &CoreTerm, f: &str, g: &mut impl FnMut(Vec<CoreTerm>) -> CoreTerm) -> CoreTerm {
    match t {
        CoreTerm::App(h, args) => {
            let args: Vec<CoreTerm> = args.iter().map(|a| map_calls(a, f, g)).collect();
            if h == f {
                g(args)
            } else {
                CoreTerm::App(h.clone(), args)
            }
        }
        t => t.map_children(|c| map_calls(c, f, g)),
    }
}

fn fresh_param(t: &Target, name: &Identifier) -> Result<String, TransformError> {
    if t.core.params.iter().any(|p| p == name.as_str()) {
        return Err(TransformError::NameClash(format!(
            "{} already has a parameter {name}",
            t.name()
        )));
    }
    Ok(name.to_string())
}

fn result_type(t: &Target) -> Result<TypeExpr, TransformError> {
    match t.surface.header.outputs.as_slice() {
        [o] => Ok(o.ty.clone()),
        _ => Err(TransformError::ShapeMismatch(format!(
            "{} has several outputs",
            t.name()
        ))),
    }
}

pub fn apply_transform(
    world: &World,
    inv: &TransformInvocation,
) -> Result<TransformResult, TransformError> {
    let opts = Options::new(inv)?;
    let t = Target::new(world, inv)?;
    match opts.schema.name {
        "simplify" => simplify(&t),
        "tail_recursion" => tail_recursion(&t, &opts.ident("new_parameter_name")),
        "finite_difference" => finite_difference(
            &t,
            &opts.expr("expression"),
            &opts.ident("new_parameter_name"),
            opts.simplify(),
        ),
        "rename_param" => rename_param(&t, &opts.ident("old"), &opts.ident("new")),
        "isomorphism" => isomorphism(
            &t,
            &Iso {
                parameter: opts.ident("parameter"),
                new_name: opts.ident("new_parameter_name"),
                old_type: opts.ident("old_type"),
                new_type: opts.ident("new_type"),
                old_to_new: opts.ident("old_to_new"),
                new_to_old: opts.ident("new_to_old"),
            },
            opts.simplify(),
        ),
        "drop_irrelevant_param" => drop_irrelevant_param(&t, &opts.ident("parameter")),
        "wrap_output" => wrap_output(&t, &opts.ident("wrap_function"), opts.simplify()),
        "restrict" => restrict(&t, &opts.expr("predicate")),
        other => Err(TransformError::UnknownTransform(other.to_string())),
    }
}

fn equality_result(
    t: &Target,
    transform: &str,
    def: CoreDef,
    report: String,
) -> Result<TransformResult, TransformError> {
    let rhs = CoreTerm::App(t.new_name.clone(), t.param_vars());
    let rule = t.rule(transform, rhs, vec![])?;
    let ob = t.obligation(
        t.params().to_vec(),
        t.precondition(),
        eq(t.old_surface_call(), t.new_surface_call(t.surface_args())),
    );
    Ok(TransformResult {
        def,
        obligations: vec![ob],
        rules: vec![rule],
        report,
    })
}

fn simplify(t: &Target) -> Result<TransformResult, TransformError> {
    let mut def = t.derived("simplify");
    def.inner = t.simplify(&def.inner, &t.guard_parts(), vec![])?;
    let report = format!("simplified {} into {}", t.name(), t.new_name);
    equality_result(t, "simplify", def, report)
}

fn rename_param(
    t: &Target,
    old: &Identifier,
    new: &Identifier,
) -> Result<TransformResult, TransformError> {
    let i = t.param_index(old)?;
    if old == new {
        return Err(TransformError::NameClash(format!(
            "{old} is renamed to itself"
        )));
    }
    let new_name = fresh_param(t, new)?;
    let mut def = t.derived("rename_param");
    let map = vec![(old.to_string(), CoreTerm::Var(new_name.clone()))];
    def.params[i] = new_name;
    def.guard = def.guard.substitute(&map);
    def.inner = def.inner.substitute(&map);
    def.measure = def.measure.map(|m| m.substitute(&map));
    let report = format!("renamed parameter {old} of {} to {new}", t.name());
    equality_result(t, "rename_param", def, report)
}

fn restrict(t: &Target, predicate: &Expression) -> Result<TransformResult, TransformError> {
    let env = t.env();
    let mut ck = Checker::typer(t.world);
    for (n, ty) in &env {
        ck.bind_type(n.clone(), ty.clone());
    }
    ck.check_bool(predicate)?;
    let p = to_core_expr(t.world, &env, predicate)?;
    let mut def = t.derived("restrict");
    let mut guard: Vec<CoreTerm> = def.guard.conjuncts().into_iter().cloned().collect();
    guard.extend(condition_parts(&p));
    def.guard = CoreTerm::and(guard);
    let rhs = CoreTerm::App(t.new_name.clone(), t.param_vars());
    let rule = t.rule("restrict", rhs, condition_parts(&p))?;
    let mut hyps = t.precondition();
    hyps.push(predicate.clone());
    let ob = t.obligation(
        t.params().to_vec(),
        hyps,
        eq(t.old_surface_call(), t.new_surface_call(t.surface_args())),
    );
    Ok(TransformResult {
        def,
        obligations: vec![ob],
        rules: vec![rule],
        report: format!("restricted {} by {predicate}", t.name()),
    })
}

/// A recursive branch `combine(step, f(args))`, possibly under tests.
struct Decomposed {
    step: Option<CoreTerm>,
    args: Vec<CoreTerm>,
}

fn decompose(t: &CoreTerm, f: &str, op: &mut Option<String>) -> Option<Decomposed> {
    match t {
        CoreTerm::App(g, args) if g == f => {
            if args.iter().any(|a| a.calls(f)) {
                return None;
            }
            Some(Decomposed {
                step: None,
                args: args.clone(),
            })
        }
        CoreTerm::App(g, args)
            if args.len() == 2 && COMBINE_OPERATORS.iter().any(|(o, _)| o == g) =>
        {
            if op.as_ref().is_some_and(|o| o != g) {
                return None;
            }
            *op = Some(g.clone());
            let (other, rec) = match (args[0].calls(f), args[1].calls(f)) {
                (false, true) => (&args[0], &args[1]),
                (true, false) => (&args[1], &args[0]),
                _ => return None,
            };
            let d = decompose(rec, f, op)?;
            let step = match d.step {
                None => other.clone(),
                Some(s) => CoreTerm::app(g, vec![other.clone(), s]),
            };
            Some(Decomposed {
                step: Some(step),
                args: d.args,
            })
        }
        CoreTerm::If(c, a, b) if !c.calls(f) => {
            let da = decompose(a, f, op)?;
            let db = decompose(b, f, op)?;
            if da.args != db.args {
                return None;
            }
            let step = match (da.step, db.step) {
                (None, None) => None,
                (sa, sb) => {
                    let id = identity(op.as_deref()?).0;
                    Some(CoreTerm::ite(
                        (**c).clone(),
                        sa.unwrap_or_else(|| id.clone()),
                        sb.unwrap_or(id),
                    ))
                }
            };
            Some(Decomposed {
                step,
                args: da.args,
            })
        }
        _ => None,
    }
}

fn tail_recursion(t: &Target, acc: &Identifier) -> Result<TransformResult, TransformError> {
    let f = t.name();
    if t.core.clique.len() > 1 {
        return Err(TransformError::ShapeMismatch(format!(
            "{f} is mutually recursive"
        )));
    }
    let acc_name = fresh_param(t, acc)?;
    let acc_ty = result_type(t)?;
    let facts = t.guard_parts();
    let prepared = t.simplify(&t.core.inner, &facts, vec![])?;
    let shape = || {
        TransformError::ShapeMismatch(format!(
            "{f} is not `if (test) base else combine(step, {f}(..))`"
        ))
    };
    let CoreTerm::If(test, a, b) = &prepared else {
        return Err(shape());
    };
    if test.calls(f) {
        return Err(shape());
    }
    let rec_then = match (a.calls(f), b.calls(f)) {
        (true, false) => true,
        (false, true) => false,
        _ => return Err(shape()),
    };
    let (base, rec) = if rec_then { (b, a) } else { (a, b) };
    let mut op = None;
    let d = decompose(rec, f, &mut op).ok_or_else(shape)?;
    let (Some(op), Some(step)) = (op, d.step) else {
        return Err(TransformError::ShapeMismatch(format!(
            "{f} is already tail recursive"
        )));
    };
    let acc_var = CoreTerm::Var(acc_name.clone());
    let base = CoreTerm::app(&op, vec![(**base).clone(), acc_var.clone()]);
    let mut args = d.args;
    args.push(CoreTerm::app(&op, vec![step, acc_var.clone()]));
    let call = CoreTerm::App(t.new_name.clone(), args);
    let (then, otherwise) = if rec_then { (call, base) } else { (base, call) };
    let inner = CoreTerm::ite((**test).clone(), then, otherwise);

    let mut def = t.derived("tail_recursion");
    def.params.push(acc_name.clone());
    let mut guard: Vec<CoreTerm> = def.guard.conjuncts().into_iter().cloned().collect();
    guard.push(recognize(&acc_ty, acc_var));
    def.guard = CoreTerm::and(guard);
    let mut facts = facts;
    facts.push(recognize(&acc_ty, CoreTerm::Var(acc_name.clone())));
    def.inner = t.simplify(&inner, &facts, vec![])?;

    let (id_core, id_surface) = identity(&op);
    let mut rhs_args = t.param_vars();
    rhs_args.push(id_core);
    let rule = t.rule(
        "tail_recursion",
        CoreTerm::App(t.new_name.clone(), rhs_args),
        vec![],
    )?;

    let acc_ident = Identifier::from(acc_name.as_str());
    let mut vars = t.params().to_vec();
    vars.push(TypedName {
        name: acc_ident.clone(),
        ty: acc_ty,
    });
    let mut with_acc = t.surface_args();
    with_acc.push(Expression::Variable(acc_ident.clone()));
    let general = t.obligation(
        vars,
        t.precondition(),
        eq(
            t.new_surface_call(with_acc),
            Expression::binary(
                surface_op(&op),
                t.old_surface_call(),
                Expression::Variable(acc_ident),
            ),
        ),
    );
    let mut with_id = t.surface_args();
    with_id.push(id_surface);
    let wrapper = t.obligation(
        t.params().to_vec(),
        t.precondition(),
        eq(t.old_surface_call(), t.new_surface_call(with_id)),
    );
    Ok(TransformResult {
        def,
        obligations: vec![general, wrapper],
        rules: vec![rule],
        report: format!("{} accumulates with {op} in {acc_name}", t.new_name),
    })
}

struct Iso {
    parameter: Identifier,
    new_name: Identifier,
    old_type: Identifier,
    new_type: Identifier,
    old_to_new: Identifier,
    new_to_old: Identifier,
}

fn unary<'w>(
    world: &'w World,
    name: &Identifier,
) -> Result<&'w FunctionDefinition, TransformError> {
    let f = world
        .function(name)
        .ok_or_else(|| TransformError::UnknownFunction(name.to_string()))?;
    if f.header.inputs.len() != 1 || f.header.outputs.len() != 1 {
        return Err(TransformError::BadOption(format!(
            "{name} is not a unary function"
        )));
    }
    Ok(f)
}

fn isomorphism(t: &Target, iso: &Iso, simplify: bool) -> Result<TransformResult, TransformError> {
    let i = t.param_index(&iso.parameter)?;
    let a = iso.parameter.to_string();
    let b = if iso.new_name == iso.parameter {
        a.clone()
    } else {
        fresh_param(t, &iso.new_name)?
    };
    let old_type = unary(t.world, &iso.old_type)?;
    unary(t.world, &iso.new_type)?;
    let old_to_new = unary(t.world, &iso.old_to_new)?;
    let new_to_old = unary(t.world, &iso.new_to_old)?;
    let old_ty = t.params()[i].ty.clone();
    let new_ty = new_to_old.header.inputs[0].ty.clone();
    for (g, expected) in [(old_type, &old_ty), (old_to_new, &old_ty)] {
        if !t.world.compatible(&g.header.inputs[0].ty, expected) {
            return Err(TransformError::BadOption(format!(
                "{} does not take {a}",
                g.name()
            )));
        }
    }
    let (h, g) = (iso.old_to_new.to_string(), iso.new_to_old.to_string());
    let b_var = CoreTerm::Var(b.clone());
    let to_old = CoreTerm::App(g.clone(), vec![b_var.clone()]);
    let map = vec![(a.clone(), to_old.clone())];

    let mut recognizers = Vec::new();
    let mut rest = Vec::new();
    for c in t.core.guard.conjuncts() {
        match recognizer_type(c) {
            Some((_, CoreTerm::Var(v))) if *v == a => {
                recognizers.push(recognize(&new_ty, b_var.clone()))
            }
            Some((_, CoreTerm::Var(_))) => recognizers.push(c.clone()),
            Some(_) => {}
            None => rest.push(c.substitute(&map)),
        }
    }
    recognizers.push(CoreTerm::App(iso.new_type.to_string(), vec![b_var.clone()]));
    recognizers.extend(rest);

    let mut def = t.derived("isomorphism");
    def.params[i] = b.clone();
    def.guard = CoreTerm::and(recognizers);
    let new_name = t.new_name.clone();
    let inner = map_calls(&t.core.inner, t.name(), &mut |mut args| {
        args[i] = CoreTerm::App(h.clone(), vec![args[i].clone()]);
        CoreTerm::App(new_name.clone(), args)
    });
    let inner = inner.substitute(&map);
    def.measure = def.measure.map(|m| m.substitute(&map));
    def.inner = if simplify {
        // isodata: the maps cancel at recursive argument positions
        let cancel = Rule::new(
            &format!("{h}-{g}"),
            CoreTerm::App(
                h.clone(),
                vec![CoreTerm::App(g.clone(), vec![CoreTerm::var("x")])],
            ),
            CoreTerm::var("x"),
            vec![],
            RuleOrigin::Isodata,
        )?;
        t.simplify(&inner, &condition_parts(&def.guard), vec![cancel])?
    } else {
        inner
    };

    let mut rhs_args = t.param_vars();
    rhs_args[i] = CoreTerm::App(h.clone(), vec![rhs_args[i].clone()]);
    let rule = t.rule(
        "isomorphism",
        CoreTerm::App(t.new_name.clone(), rhs_args),
        vec![],
    )?;

    let av = || Expression::Variable(iso.parameter.clone());
    let bv = || Expression::Variable(Identifier::from(b.as_str()));
    let call = |f: &Identifier, x: Expression| Expression::Call(f.clone(), vec![x]);
    let a_var = vec![TypedName {
        name: iso.parameter.clone(),
        ty: old_ty.clone(),
    }];
    let b_decl = TypedName {
        name: Identifier::from(b.as_str()),
        ty: new_ty.clone(),
    };
    let inversion = |vars: Vec<TypedName>, hyp: Expression, concl: Expression| Obligation {
        provenance: Provenance::IsomorphismInversion,
        source: Identifier::from(t.new_name.as_str()),
        variables: vars,
        hypotheses: vec![hyp],
        conclusion: concl,
    };
    let mut obligations = vec![
        inversion(
            a_var.clone(),
            call(&iso.old_type, av()),
            eq(call(&iso.new_to_old, call(&iso.old_to_new, av())), av()),
        ),
        inversion(
            vec![b_decl.clone()],
            call(&iso.new_type, bv()),
            eq(call(&iso.old_to_new, call(&iso.new_to_old, bv())), bv()),
        ),
        inversion(
            a_var,
            call(&iso.old_type, av()),
            call(&iso.new_type, call(&iso.old_to_new, av())),
        ),
        inversion(
            vec![b_decl.clone()],
            call(&iso.new_type, bv()),
            call(&iso.old_type, call(&iso.new_to_old, bv())),
        ),
    ];
    let mut mapped = t.surface_args();
    mapped[i] = call(&iso.old_to_new, av());
    obligations.push(t.obligation(
        t.params().to_vec(),
        t.precondition(),
        eq(t.old_surface_call(), t.new_surface_call(mapped)),
    ));
    // the same equation sampled over the new domain
    let mut new_vars = t.params().to_vec();
    new_vars[i] = b_decl;
    let new_env: Vec<(Identifier, TypeExpr)> = new_vars
        .iter()
        .map(|v| (v.name.clone(), v.ty.clone()))
        .collect();
    let hyps = condition_parts(&def.guard)
        .iter()
        .map(|c| t.back(&new_env, c))
        .collect::<Result<Vec<_>, _>>()?;
    let mut old_args = t.surface_args();
    old_args[i] = call(&iso.new_to_old, bv());
    let mut new_args = t.surface_args();
    new_args[i] = bv();
    obligations.push(t.obligation(
        new_vars,
        hyps,
        eq(
            t.surface_call(t.name(), old_args),
            t.new_surface_call(new_args),
        ),
    ));
    Ok(TransformResult {
        def,
        obligations,
        rules: vec![rule],
        report: format!("{} takes {b} = {h}({a})", t.new_name),
    })
}

/// The body with `wrap` pushed through conditionals and lets.
fn distribute(t: &CoreTerm, wrap: &str) -> CoreTerm {
    match t {
        CoreTerm::If(c, a, b) => {
            CoreTerm::ite((**c).clone(), distribute(a, wrap), distribute(b, wrap))
        }
        CoreTerm::Let(bs, body) => CoreTerm::Let(bs.clone(), Box::new(distribute(body, wrap))),
        t => CoreTerm::app(wrap, vec![t.clone()]),
    }
}

fn wrap_output(
    t: &Target,
    wrap: &Identifier,
    simplify: bool,
) -> Result<TransformResult, TransformError> {
    let w = unary(t.world, wrap)?;
    let out_ty = result_type(t)?;
    if !t.world.compatible(&w.header.inputs[0].ty, &out_ty) {
        return Err(TransformError::BadOption(format!(
            "{wrap} does not take the output of {}",
            t.name()
        )));
    }
    let wrap_core = t
        .world
        .core
        .get(wrap.as_str())
        .ok_or_else(|| TransformError::UnknownFunction(wrap.to_string()))?;
    let f = t.name();
    let new_name = t.new_name.clone();
    let body = distribute(&t.core.inner, wrap.as_str());
    // fold wrap(f(args)) back into the new function
    let body = fold_wrapped(&body, wrap.as_str(), f, &new_name);
    let mut def = t.derived("wrap_output");
    def.inner = if simplify {
        t.simplify(&body, &t.guard_parts(), vec![])?
    } else {
        body
    };
    def.returns = wrap_core.returns.clone();
    let ret_ty = w.header.outputs[0].ty.clone();
    def.default = CoreTerm::Const(
        candidates(t.world, &ret_ty, 2)
            .into_iter()
            .next()
            .unwrap_or(Value::Bool(false)),
    );
    let rule = Rule::new(
        &format!("{wrap}-{f}-to-{new_name}"),
        CoreTerm::app(wrap.as_str(), vec![t.call()]),
        CoreTerm::App(new_name.clone(), t.param_vars()),
        t.guard_parts(),
        RuleOrigin::Transform("wrap_output".into()),
    )?;
    let ob = t.obligation(
        t.params().to_vec(),
        t.precondition(),
        eq(
            t.new_surface_call(t.surface_args()),
            Expression::Call(wrap.clone(), vec![t.old_surface_call()]),
        ),
    );
    Ok(TransformResult {
        def,
        obligations: vec![ob],
        rules: vec![rule],
        report: format!("{new_name} computes {wrap}({f}(..))"),
    })
}

fn fold_wrapped(t: &CoreTerm, wrap: &str, f: &str, g: &str) -> CoreTerm {
    match t {
        CoreTerm::App(w, args) if w == wrap && args.len() == 1 => match &args[0] {
            CoreTerm::App(h, inner) if h == f => CoreTerm::App(
                g.to_string(),
                inner.iter().map(|a| fold_wrapped(a, wrap, f, g)).collect(),
            ),
            _ => t.map_children(|c| fold_wrapped(c, wrap, f, g)),
        },
        t => t.map_children(|c| fold_wrapped(c, wrap, f, g)),
    }
}

/// Replaces occurrences of `e` by `c`.
fn abstract_term(t: &CoreTerm, e: &CoreTerm, c: &CoreTerm) -> CoreTerm {
    if t == e {
        return c.clone();
    }
    t.map_children(|x| abstract_term(x, e, c))
}

/// Recursive calls of `f` with the tests on the path to them; calls
/// under a binder are skipped.
fn calls_on_paths(
    t: &CoreTerm,
    f: &str,
    path: &mut Vec<CoreTerm>,
    out: &mut Vec<(Vec<CoreTerm>, Vec<CoreTerm>)>,
) {
    match t {
        CoreTerm::If(c, a, b) => {
            calls_on_paths(c, f, path, out);
            path.push((**c).clone());
            calls_on_paths(a, f, path, out);
            path.pop();
            path.push(CoreTerm::not((**c).clone()));
            calls_on_paths(b, f, path, out);
            path.pop();
        }
        CoreTerm::Let(..) | CoreTerm::Quant { .. } => {}
        CoreTerm::App(g, args) => {
            for a in args {
                calls_on_paths(a, f, path, out);
            }
            if g == f {
                out.push((path.clone(), args.clone()));
            }
        }
        _ => {}
    }
}

fn finite_difference(
    t: &Target,
    expression: &Expression,
    c: &Identifier,
    simplify: bool,
) -> Result<TransformResult, TransformError> {
    let env = t.env();
    let mut ck = Checker::typer(t.world);
    for (n, ty) in &env {
        ck.bind_type(n.clone(), ty.clone());
    }
    let c_ty = ck.infer(expression, None)?;
    let e = to_core_expr(t.world, &env, expression)?;
    let c_name = fresh_param(t, c)?;
    let c_var = CoreTerm::Var(c_name.clone());
    let e_vars = e.free_vars();
    let f = t.name();
    let params = t.core.params.clone();
    let facts = t.guard_parts();

    let mut failure = None;
    let mut fold = |args: &[CoreTerm]| -> CoreTerm {
        let map: Vec<(String, CoreTerm)> =
            params.iter().cloned().zip(args.iter().cloned()).collect();
        let updated = e.substitute(&map);
        let mut rw = Rewriter::new(t.world);
        rw.lift_ifs = true;
        let lifted = rw.rewrite(&updated, &facts);
        let folded = abstract_term(&lifted, &e, &c_var);
        let folded = Rewriter::new(t.world).rewrite(&folded, &facts);
        let changed: Vec<&String> = params
            .iter()
            .zip(args)
            .filter(|(p, a)| e_vars.contains(p) && **a != CoreTerm::Var((*p).clone()))
            .map(|(p, _)| p)
            .collect();
        if let Some(v) = changed.iter().find(|v| folded.mentions_var(v)) {
            failure.get_or_insert_with(|| {
                format!("{updated} does not reduce to a term in {c_name}; it still needs {v}")
            });
        }
        folded
    };
    let new_name = t.new_name.clone();
    let inner = map_calls(&t.core.inner, f, &mut |args| {
        let mut args = args;
        let next = fold(&args);
        args.push(next);
        CoreTerm::App(new_name.clone(), args)
    });
    if let Some(msg) = failure {
        return Err(TransformError::FoldFailure(msg));
    }
    let inner = abstract_term(&inner, &e, &c_var);

    let mut def = t.derived("finite_difference");
    def.params.push(c_name.clone());
    let mut guard: Vec<CoreTerm> = def.guard.conjuncts().into_iter().cloned().collect();
    guard.push(recognize(&c_ty, c_var.clone()));
    guard.push(CoreTerm::app("equal", vec![c_var.clone(), e.clone()]));
    def.guard = CoreTerm::and(guard);
    def.inner = if simplify {
        t.simplify(&inner, &condition_parts(&def.guard), vec![])?
    } else {
        inner
    };

    let mut rhs_args = t.param_vars();
    rhs_args.push(e.clone());
    let rule = t.rule(
        "finite_difference",
        CoreTerm::App(new_name.clone(), rhs_args),
        vec![],
    )?;

    let c_ident = Identifier::from(c_name.as_str());
    let mut with_e = t.surface_args();
    with_e.push(expression.clone());
    let mut obligations = vec![t.obligation(
        t.params().to_vec(),
        t.precondition(),
        eq(t.old_surface_call(), t.new_surface_call(with_e)),
    )];
    // the new argument of every recursive call keeps the invariant
    let mut vars = t.params().to_vec();
    vars.push(TypedName {
        name: c_ident.clone(),
        ty: c_ty,
    });
    let full_env: Vec<(Identifier, TypeExpr)> = vars
        .iter()
        .map(|v| (v.name.clone(), v.ty.clone()))
        .collect();
    let invariant = eq(Expression::Variable(c_ident), expression.clone());
    let mut sites = Vec::new();
    calls_on_paths(&def.inner, &new_name, &mut Vec::new(), &mut sites);
    for (path, args) in sites {
        let mut hyps = t.precondition();
        hyps.push(invariant.clone());
        for p in &path {
            hyps.push(t.back(&full_env, p)?);
        }
        let n = params.len();
        let map: Vec<(String, CoreTerm)> = params
            .iter()
            .cloned()
            .zip(args[..n].iter().cloned())
            .collect();
        let lhs = t.back(&full_env, &args[n])?;
        let rhs = t.back(&full_env, &e.substitute(&map))?;
        obligations.push(t.obligation(vars.clone(), hyps, eq(lhs, rhs)));
    }
    Ok(TransformResult {
        def,
        obligations,
        rules: vec![rule],
        report: format!("{new_name} maintains {c_name} = {expression}"),
    })
}

fn drop_irrelevant_param(t: &Target, p: &Identifier) -> Result<TransformResult, TransformError> {
    let i = t.param_index(p)?;
    let f = t.name();
    let new_name = t.new_name.clone();
    let inner = map_calls(&t.core.inner, f, &mut |mut args| {
        args.remove(i);
        CoreTerm::App(new_name.clone(), args)
    });
    if inner.mentions_var(p.as_str()) {
        return Err(TransformError::NotIrrelevant(format!(
            "{p} influences the result of {f}"
        )));
    }
    if t.core
        .measure
        .as_ref()
        .is_some_and(|m| m.mentions_var(p.as_str()))
    {
        return Err(TransformError::NotIrrelevant(format!(
            "the measure of {f} depends on {p}"
        )));
    }
    let mut def = t.derived("drop_irrelevant_param");
    def.params.remove(i);
    def.guard = CoreTerm::and(
        t.core
            .guard
            .conjuncts()
            .into_iter()
            .filter(|c| !c.mentions_var(p.as_str()))
            .cloned()
            .collect(),
    );
    def.inner = inner;
    let mut rhs_args = t.param_vars();
    rhs_args.remove(i);
    let rule = t.rule(
        "drop_irrelevant_param",
        CoreTerm::App(new_name.clone(), rhs_args),
        vec![],
    )?;
    let mut new_args = t.surface_args();
    new_args.remove(i);
    let ob = t.obligation(
        t.params().to_vec(),
        t.precondition(),
        eq(t.old_surface_call(), t.new_surface_call(new_args)),
    );
    Ok(TransformResult {
        def,
        obligations: vec![ob],
        rules: vec![rule],
        report: format!("dropped {p} from {f}"),
    })
}
