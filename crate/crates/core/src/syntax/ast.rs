//! Abstract syntax of the surface language.
//!
//! Only expressions are stored: statement-looking forms (`return e;`,
//! `if (..) {..} else {..}`, `let`) are desugared by the parser.

use std::fmt;

use num_bigint::BigInt;

/// A case-sensitive name: a letter or underscore followed by letters,
/// digits or underscores.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Identifier(String);

impl Identifier {
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        Self::is_valid(&name).then_some(Identifier(name))
    }

    /// A name outside the surface syntax, for internal canonical forms.
    pub(crate) fn unchecked(name: String) -> Self {
        Identifier(name)
    }

    pub fn is_valid(name: &str) -> bool {
        let mut chars = name.chars();
        match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return false,
        }
        chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Identifier {
    fn from(name: &str) -> Self {
        debug_assert!(Identifier::is_valid(name), "invalid identifier {name:?}");
        Identifier(name.to_string())
    }
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for Identifier {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl std::ops::Deref for Identifier {
    type Target = str;
    fn deref(&self) -> &str {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeExpr {
    Bool,
    Char,
    String,
    Int,
    Named(Identifier),
    Option(Box<TypeExpr>),
    Set(Box<TypeExpr>),
    Seq(Box<TypeExpr>),
    Map(Box<TypeExpr>, Box<TypeExpr>),
    Tuple(Vec<TypeExpr>),
}

impl TypeExpr {
    pub fn named(name: &str) -> Self {
        TypeExpr::Named(name.into())
    }
    pub fn seq(elem: TypeExpr) -> Self {
        TypeExpr::Seq(Box::new(elem))
    }
    pub fn set(elem: TypeExpr) -> Self {
        TypeExpr::Set(Box::new(elem))
    }
    pub fn option(base: TypeExpr) -> Self {
        TypeExpr::Option(Box::new(base))
    }
    pub fn map(dom: TypeExpr, rng: TypeExpr) -> Self {
        TypeExpr::Map(Box::new(dom), Box::new(rng))
    }

    /// Built-in parameterized types (the ones that need instances).
    pub fn is_parameterized(&self) -> bool {
        matches!(
            self,
            TypeExpr::Option(_)
                | TypeExpr::Set(_)
                | TypeExpr::Seq(_)
                | TypeExpr::Map(..)
                | TypeExpr::Tuple(_)
        )
    }

    pub fn children(&self) -> Vec<&TypeExpr> {
        match self {
            TypeExpr::Option(t) | TypeExpr::Set(t) | TypeExpr::Seq(t) => vec![t],
            TypeExpr::Map(k, v) => vec![k, v],
            TypeExpr::Tuple(ts) => ts.iter().collect(),
            _ => vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Literal {
    Bool(bool),
    /// ISO 8859-1 code point.
    Char(u8),
    /// Every char is in the ISO 8859-1 range.
    String(String),
    Int(BigInt),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    And,
    Or,
    Implies,
    ImpliedBy,
    Iff,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 16] = [
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
        BinaryOp::And,
        BinaryOp::Or,
        BinaryOp::Implies,
        BinaryOp::ImpliedBy,
        BinaryOp::Iff,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
            BinaryOp::Implies => "==>",
            BinaryOp::ImpliedBy => "<==",
            BinaryOp::Iff => "<==>",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Iff => 1,
            BinaryOp::Implies | BinaryOp::ImpliedBy => 2,
            BinaryOp::Or => 3,
            BinaryOp::And => 4,
            BinaryOp::Eq
            | BinaryOp::Ne
            | BinaryOp::Lt
            | BinaryOp::Le
            | BinaryOp::Gt
            | BinaryOp::Ge => 5,
            BinaryOp::Add | BinaryOp::Sub => 6,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 7,
        }
    }

    /// Implications associate to the right, everything else to the left.
    pub fn right_assoc(self) -> bool {
        matches!(self, BinaryOp::Implies | BinaryOp::ImpliedBy)
    }

    pub fn is_logical(self) -> bool {
        matches!(
            self,
            BinaryOp::And | BinaryOp::Or | BinaryOp::Implies | BinaryOp::ImpliedBy | BinaryOp::Iff
        )
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(
            self,
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem
        )
    }

    pub fn is_ordering(self) -> bool {
        matches!(
            self,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypedName {
    pub name: Identifier,
    pub ty: TypeExpr,
}

impl TypedName {
    pub fn new(name: &str, ty: TypeExpr) -> Self {
        TypedName {
            name: name.into(),
            ty,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalBinding {
    pub name: Identifier,
    pub ty: TypeExpr,
    pub value: Expression,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expression {
    Literal(Literal),
    Variable(Identifier),
    Unary(UnaryOp, Box<Expression>),
    Binary(BinaryOp, Box<Expression>, Box<Expression>),
    Conditional {
        test: Box<Expression>,
        then: Box<Expression>,
        otherwise: Box<Expression>,
    },
    Call(Identifier, Vec<Expression>),
    /// Parallel binding: every value is evaluated in the outer scope.
    Bind {
        locals: Vec<LocalBinding>,
        body: Box<Expression>,
    },
    Tuple(Vec<Expression>),
    TupleAccess(Box<Expression>, usize),
    ProductConstruct {
        ty: Identifier,
        fields: Vec<(Identifier, Expression)>,
    },
    ProductAccess(Box<Expression>, Identifier),
    ProductUpdate(Box<Expression>, Vec<(Identifier, Expression)>),
    SumConstruct {
        ty: Identifier,
        alternative: Identifier,
        fields: Vec<(Identifier, Expression)>,
    },
    SumTest(Box<Expression>, Identifier),
    SumAccess(Box<Expression>, Identifier, Identifier),
    Some(Box<Expression>),
    None,
    /// The empty collection of the given (set, sequence or map) type.
    Empty(TypeExpr),
}

impl Expression {
    pub fn var(name: &str) -> Self {
        Expression::Variable(name.into())
    }
    pub fn int(n: i64) -> Self {
        Expression::Literal(Literal::Int(BigInt::from(n)))
    }
    pub fn bool(b: bool) -> Self {
        Expression::Literal(Literal::Bool(b))
    }
    pub fn call(name: &str, args: Vec<Expression>) -> Self {
        Expression::Call(name.into(), args)
    }
    pub fn binary(op: BinaryOp, l: Expression, r: Expression) -> Self {
        Expression::Binary(op, Box::new(l), Box::new(r))
    }
    pub fn not(e: Expression) -> Self {
        Expression::Unary(UnaryOp::Not, Box::new(e))
    }
    pub fn cond(test: Expression, then: Expression, otherwise: Expression) -> Self {
        Expression::Conditional {
            test: Box::new(test),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        }
    }

    /// Conjunction of a list, `true` when empty.
    pub fn conjoin(mut parts: Vec<Expression>) -> Self {
        if parts.is_empty() {
            return Expression::bool(true);
        }
        let first = parts.remove(0);
        parts
            .into_iter()
            .fold(first, |acc, e| Expression::binary(BinaryOp::And, acc, e))
    }

    /// Splits a left-nested conjunction into its conjuncts.
    pub fn conjuncts(&self) -> Vec<&Expression> {
        match self {
            Expression::Binary(BinaryOp::And, l, r) => {
                let mut out = l.conjuncts();
                out.extend(r.conjuncts());
                out
            }
            e => vec![e],
        }
    }

    /// Immediate subexpressions, in evaluation order.
    pub fn children(&self) -> Vec<&Expression> {
        match self {
            Expression::Literal(_)
            | Expression::Variable(_)
            | Expression::None
            | Expression::Empty(_) => vec![],
            Expression::Unary(_, e)
            | Expression::TupleAccess(e, _)
            | Expression::ProductAccess(e, _)
            | Expression::SumTest(e, _)
            | Expression::SumAccess(e, _, _)
            | Expression::Some(e) => vec![e],
            Expression::Binary(_, l, r) => vec![l, r],
            Expression::Conditional {
                test,
                then,
                otherwise,
            } => vec![test, then, otherwise],
            Expression::Call(_, args) | Expression::Tuple(args) => args.iter().collect(),
            Expression::Bind { locals, body } => {
                let mut out: Vec<&Expression> = locals.iter().map(|l| &l.value).collect();
                out.push(body);
                out
            }
            Expression::ProductConstruct { fields, .. }
            | Expression::SumConstruct { fields, .. } => fields.iter().map(|(_, e)| e).collect(),
            Expression::ProductUpdate(e, fields) => {
                let mut out = vec![e.as_ref()];
                out.extend(fields.iter().map(|(_, e)| e));
                out
            }
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// Names of all functions called anywhere in the expression.
    pub fn called_functions(&self, out: &mut Vec<Identifier>) {
        if let Expression::Call(f, _) = self {
            if !out.contains(f) {
                out.push(f.clone());
            }
        }
        for c in self.children() {
            c.called_functions(out);
        }
    }

    /// Free variables, in first-occurrence order.
    pub fn free_variables(&self) -> Vec<Identifier> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Identifier>, out: &mut Vec<Identifier>) {
        match self {
            Expression::Variable(v) => {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Expression::Bind { locals, body } => {
                for l in locals {
                    l.value.collect_free(bound, out);
                }
                let before = bound.len();
                bound.extend(locals.iter().map(|l| l.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(before);
            }
            e => {
                for c in e.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Capture-avoiding substitution of free variables.
    pub fn substitute(&self, map: &[(Identifier, Expression)]) -> Expression {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Expression::Variable(v) => map
                .iter()
                .find(|(k, _)| k == v)
                .map(|(_, e)| e.clone())
                .unwrap_or_else(|| self.clone()),
            Expression::Bind { locals, body } => {
                let locals_new: Vec<LocalBinding> = locals
                    .iter()
                    .map(|l| LocalBinding {
                        name: l.name.clone(),
                        ty: l.ty.clone(),
                        value: l.value.substitute(map),
                    })
                    .collect();
                let inner: Vec<(Identifier, Expression)> = map
                    .iter()
                    .filter(|(k, _)| !locals.iter().any(|l| &l.name == k))
                    .cloned()
                    .collect();
                // rename locals that would capture a free variable of the replacement
                let mut captured = Vec::new();
                for (_, e) in &inner {
                    captured.extend(e.free_variables());
                }
                let mut renames = Vec::new();
                let mut final_locals = Vec::new();
                for l in locals_new {
                    if captured.contains(&l.name) {
                        let fresh = fresh_name(&l.name, |n| {
                            captured.iter().any(|c| c.as_str() == n)
                                || body.free_variables().iter().any(|c| c.as_str() == n)
                        });
                        renames.push((l.name.clone(), Expression::Variable(fresh.clone())));
                        final_locals.push(LocalBinding { name: fresh, ..l });
                    } else {
                        final_locals.push(l);
                    }
                }
                let body = body.substitute(&renames).substitute(&inner);
                Expression::Bind {
                    locals: final_locals,
                    body: Box::new(body),
                }
            }
            e => e.map_children(|c| c.substitute(map)),
        }
    }

    /// Rebuilds the node with every immediate child transformed.
    pub fn map_children(&self, mut f: impl FnMut(&Expression) -> Expression) -> Expression {
        let mut b = |e: &Expression| Box::new(f(e));
        match self {
            Expression::Literal(_)
            | Expression::Variable(_)
            | Expression::None
            | Expression::Empty(_) => self.clone(),
            Expression::Unary(op, e) => Expression::Unary(*op, b(e)),
            Expression::Binary(op, l, r) => {
                let l = b(l);
                Expression::Binary(*op, l, b(r))
            }
            Expression::Conditional {
                test,
                then,
                otherwise,
            } => {
                let test = b(test);
                let then = b(then);
                Expression::Conditional {
                    test,
                    then,
                    otherwise: b(otherwise),
                }
            }
            Expression::Call(name, args) => {
                Expression::Call(name.clone(), args.iter().map(|a| *b(a)).collect())
            }
            Expression::Bind { locals, body } => {
                let locals = locals
                    .iter()
                    .map(|l| LocalBinding {
                        name: l.name.clone(),
                        ty: l.ty.clone(),
                        value: *b(&l.value),
                    })
                    .collect();
                Expression::Bind {
                    locals,
                    body: b(body),
                }
            }
            Expression::Tuple(es) => Expression::Tuple(es.iter().map(|a| *b(a)).collect()),
            Expression::TupleAccess(e, i) => Expression::TupleAccess(b(e), *i),
            Expression::ProductConstruct { ty, fields } => Expression::ProductConstruct {
                ty: ty.clone(),
                fields: fields.iter().map(|(n, e)| (n.clone(), *b(e))).collect(),
            },
            Expression::ProductAccess(e, f) => Expression::ProductAccess(b(e), f.clone()),
            Expression::ProductUpdate(e, fields) => {
                let e = b(e);
                Expression::ProductUpdate(
                    e,
                    fields.iter().map(|(n, e)| (n.clone(), *b(e))).collect(),
                )
            }
            Expression::SumConstruct {
                ty,
                alternative,
                fields,
            } => Expression::SumConstruct {
                ty: ty.clone(),
                alternative: alternative.clone(),
                fields: fields.iter().map(|(n, e)| (n.clone(), *b(e))).collect(),
            },
            Expression::SumTest(e, a) => Expression::SumTest(b(e), a.clone()),
            Expression::SumAccess(e, a, f) => Expression::SumAccess(b(e), a.clone(), f.clone()),
            Expression::Some(e) => Expression::Some(b(e)),
        }
    }

    /// Renames calls to `from` into calls to `to`.
    pub fn rename_calls(&self, from: &str, to: &Identifier) -> Expression {
        match self {
            Expression::Call(f, args) if f.as_str() == from => Expression::Call(
                to.clone(),
                args.iter().map(|a| a.rename_calls(from, to)).collect(),
            ),
            e => e.map_children(|c| c.rename_calls(from, to)),
        }
    }
}

/// `base`, `base_1`, `base_2`, ... whichever is first not taken.
pub fn fresh_name(base: &Identifier, taken: impl Fn(&str) -> bool) -> Identifier {
    let mut i = 1;
    loop {
        let candidate = format!("{base}_{i}");
        if !taken(&candidate) {
            return Identifier(candidate);
        }
        i += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionHeader {
    pub name: Identifier,
    pub inputs: Vec<TypedName>,
    pub outputs: Vec<TypedName>,
}

impl FunctionHeader {
    /// The result type: the single output's type, or a tuple of them.
    pub fn result_type(&self) -> TypeExpr {
        if self.outputs.len() == 1 {
            self.outputs[0].ty.clone()
        } else {
            TypeExpr::Tuple(self.outputs.iter().map(|o| o.ty.clone()).collect())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctionBody {
    Regular(Expression),
    Quantified {
        quantifier: Quantifier,
        bound: Vec<TypedName>,
        matrix: Expression,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FunctionDefinition {
    pub header: FunctionHeader,
    pub precondition: Option<Expression>,
    pub postcondition: Option<Expression>,
    pub body: FunctionBody,
}

impl FunctionDefinition {
    pub fn name(&self) -> &Identifier {
        &self.header.name
    }

    pub fn is_quantified(&self) -> bool {
        matches!(self.body, FunctionBody::Quantified { .. })
    }

    pub fn regular_body(&self) -> Option<&Expression> {
        match &self.body {
            FunctionBody::Regular(e) => Some(e),
            FunctionBody::Quantified { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alternative {
    pub name: Identifier,
    pub fields: Vec<TypedName>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeBody {
    Product {
        fields: Vec<TypedName>,
        invariant: Option<Expression>,
    },
    Sum {
        alternatives: Vec<Alternative>,
    },
    Subtype {
        supertype: TypeExpr,
        variable: Identifier,
        restriction: Expression,
        witness: Option<Expression>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TypeDefinition {
    pub name: Identifier,
    pub body: TypeBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpecBody {
    /// A boolean expression over the function variables.
    Plain(Expression),
    Quantified {
        quantifier: Quantifier,
        bound: Vec<TypedName>,
        matrix: Expression,
    },
    /// A relation over the named inputs and outputs of the single header.
    IoRelation(Expression),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Specification {
    pub name: Identifier,
    pub headers: Vec<FunctionHeader>,
    pub body: SpecBody,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Theorem {
    pub name: Identifier,
    pub variables: Vec<TypedName>,
    pub formula: Expression,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum OptionValue {
    Identifier(Identifier),
    Bool(bool),
    Expression(Expression),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TransformInvocation {
    pub new_name: Identifier,
    pub target: Identifier,
    pub transform: Identifier,
    pub options: Vec<(Identifier, OptionValue)>,
}

impl TransformInvocation {
    pub fn option(&self, name: &str) -> Option<&OptionValue> {
        self.options
            .iter()
            .find(|(n, _)| n.as_str() == name)
            .map(|(_, v)| v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TopLevel {
    Type(TypeDefinition),
    TypeClique(Vec<TypeDefinition>),
    Function(FunctionDefinition),
    FunctionClique(Vec<FunctionDefinition>),
    Specification(Specification),
    Theorem(Theorem),
    Transform(TransformInvocation),
}

impl TopLevel {
    /// Names this unit introduces.
    pub fn defined_names(&self) -> Vec<&Identifier> {
        match self {
            TopLevel::Type(t) => vec![&t.name],
            TopLevel::TypeClique(ts) => ts.iter().map(|t| &t.name).collect(),
            TopLevel::Function(f) => vec![f.name()],
            TopLevel::FunctionClique(fs) => fs.iter().map(|f| f.name()).collect(),
            TopLevel::Specification(s) => vec![&s.name],
            TopLevel::Theorem(t) => vec![&t.name],
            TopLevel::Transform(t) => vec![&t.new_name],
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TopLevel::Type(_) | TopLevel::TypeClique(_) => "type",
            TopLevel::Function(_) | TopLevel::FunctionClique(_) => "function",
            TopLevel::Specification(_) => "specification",
            TopLevel::Theorem(_) => "theorem",
            TopLevel::Transform(_) => "transform",
        }
    }
}
