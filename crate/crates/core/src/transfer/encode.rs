//! Make-myself encoding of surface ASTs.
//!
//! Every AST node becomes `(SYNTHETO::MAKE-<KIND> :KEY value ...)`. Names
//! travel as strings inside `MAKE-IDENTIFIER`, lists as `(LIST ...)` or
//! `NIL`, booleans and absent options as `T` / `NIL`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use thiserror::Error;

use super::sexpr::SExpr;
use crate::syntax::*;

pub const PACKAGE: &str = "SYNTHETO";
pub const TOPLEVEL_HEAD: &str = "PROCESS-SYNTHETO-TOPLEVEL";

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("unknown constructor {0}")]
    UnknownConstructor(String),
    #[error("expected {expected}, found {found}")]
    Malformed { expected: String, found: String },
    #[error("{head}: missing keyword :{keyword}")]
    MissingKeyword { head: String, keyword: String },
    #[error("{head}: unexpected keyword :{keyword}")]
    UnexpectedKeyword { head: String, keyword: String },
}

pub(crate) fn make(kind: &str, args: Vec<(&str, SExpr)>) -> SExpr {
    let mut items = vec![SExpr::sym(PACKAGE, &format!("MAKE-{kind}"))];
    for (k, v) in args {
        items.push(SExpr::Keyword(k.to_string()));
        items.push(v);
    }
    SExpr::List(items)
}

pub(crate) fn list(items: Vec<SExpr>) -> SExpr {
    if items.is_empty() {
        return SExpr::nil();
    }
    let mut out = vec![SExpr::special("LIST")];
    out.extend(items);
    SExpr::List(out)
}

fn opt(e: Option<SExpr>) -> SExpr {
    e.unwrap_or_else(SExpr::nil)
}

/// `(SYNTHETO::PROCESS-SYNTHETO-TOPLEVEL <unit>)`.
pub fn ast_to_transfer(u: &TopLevel) -> SExpr {
    SExpr::List(vec![SExpr::sym(PACKAGE, TOPLEVEL_HEAD), encode_toplevel(u)])
}

pub fn transfer_to_ast(s: &SExpr) -> Result<TopLevel, DecodeError> {
    match s.as_list() {
        Some([head, unit]) if head.is_symbol(PACKAGE, TOPLEVEL_HEAD) => decode_toplevel(unit),
        _ => Err(malformed("(SYNTHETO::PROCESS-SYNTHETO-TOPLEVEL ...)", s)),
    }
}

fn malformed(expected: &str, found: &SExpr) -> DecodeError {
    let mut text = found.to_string();
    if text.len() > 80 {
        text.truncate(77);
        text.push_str("...");
    }
    DecodeError::Malformed {
        expected: expected.to_string(),
        found: text,
    }
}

pub fn encode_identifier(id: &Identifier) -> SExpr {
    make("IDENTIFIER", vec![("NAME", SExpr::String(id.to_string()))])
}

pub fn encode_toplevel(u: &TopLevel) -> SExpr {
    match u {
        TopLevel::Type(t) => make("TOPLEVEL-TYPE", vec![("GET", encode_typedef(t))]),
        TopLevel::TypeClique(ts) => make(
            "TOPLEVEL-TYPES",
            vec![("GET", list(ts.iter().map(encode_typedef).collect()))],
        ),
        TopLevel::Function(f) => make("TOPLEVEL-FUNCTION", vec![("GET", encode_function(f))]),
        TopLevel::FunctionClique(fs) => make(
            "TOPLEVEL-FUNCTIONS",
            vec![("GET", list(fs.iter().map(encode_function).collect()))],
        ),
        TopLevel::Specification(s) => {
            let body = match &s.body {
                SpecBody::Plain(e) => make("FUNCTION-SPEC-REGULAR", vec![("BODY", encode_expr(e))]),
                SpecBody::Quantified {
                    quantifier,
                    bound,
                    matrix,
                } => make(
                    "FUNCTION-SPEC-QUANTIFIED",
                    vec![
                        ("QUANTIFIER", encode_quantifier(*quantifier)),
                        ("VARIABLES", typed_vars(bound)),
                        ("MATRIX", encode_expr(matrix)),
                    ],
                ),
                SpecBody::IoRelation(e) => make(
                    "FUNCTION-SPEC-INPUT-OUTPUT",
                    vec![("RELATION", encode_expr(e))],
                ),
            };
            let spec = make(
                "FUNCTION-SPECIFICATION",
                vec![
                    ("NAME", encode_identifier(&s.name)),
                    (
                        "FUNCTIONS",
                        list(s.headers.iter().map(encode_header).collect()),
                    ),
                    ("BODY", body),
                ],
            );
            make("TOPLEVEL-SPECIFICATION", vec![("GET", spec)])
        }
        TopLevel::Theorem(t) => {
            let th = make(
                "THEOREM",
                vec![
                    ("NAME", encode_identifier(&t.name)),
                    ("VARIABLES", typed_vars(&t.variables)),
                    ("FORMULA", encode_expr(&t.formula)),
                ],
            );
            make("TOPLEVEL-THEOREM", vec![("GET", th)])
        }
        TopLevel::Transform(t) => {
            let args = t
                .options
                .iter()
                .map(|(name, v)| {
                    let value = match v {
                        OptionValue::Identifier(i) => make(
                            "TRANSFORM-ARGUMENT-VALUE-IDENTIFIER",
                            vec![("NAME", encode_identifier(i))],
                        ),
                        OptionValue::Bool(b) => make(
                            "TRANSFORM-ARGUMENT-VALUE-BOOL",
                            vec![("VAL", SExpr::bool(*b))],
                        ),
                        OptionValue::Expression(e) => make(
                            "TRANSFORM-ARGUMENT-VALUE-TERM",
                            vec![("GET", encode_expr(e))],
                        ),
                    };
                    make(
                        "TRANSFORM-ARGUMENT",
                        vec![("NAME", encode_identifier(name)), ("VALUE", value)],
                    )
                })
                .collect();
            let tr = make(
                "TRANSFORM",
                vec![
                    ("NEW-FUNCTION-NAME", encode_identifier(&t.new_name)),
                    ("OLD-FUNCTION-NAME", encode_identifier(&t.target)),
                    ("TRANSFORM-NAME", SExpr::String(t.transform.to_string())),
                    ("ARGUMENTS", list(args)),
                ],
            );
            make("TOPLEVEL-TRANSFORMATION", vec![("GET", tr)])
        }
    }
}

fn encode_quantifier(q: Quantifier) -> SExpr {
    match q {
        Quantifier::Forall => make("QUANTIFIER-FORALL", vec![]),
        Quantifier::Exists => make("QUANTIFIER-EXISTS", vec![]),
    }
}

fn typed_var(t: &TypedName) -> SExpr {
    make(
        "TYPED-VARIABLE",
        vec![
            ("NAME", encode_identifier(&t.name)),
            ("TYPE", encode_type(&t.ty)),
        ],
    )
}

fn typed_vars(ts: &[TypedName]) -> SExpr {
    list(ts.iter().map(typed_var).collect())
}

fn fields(ts: &[TypedName]) -> SExpr {
    list(
        ts.iter()
            .map(|t| {
                make(
                    "FIELD",
                    vec![
                        ("NAME", encode_identifier(&t.name)),
                        ("TYPE", encode_type(&t.ty)),
                    ],
                )
            })
            .collect(),
    )
}

pub fn encode_typedef(t: &TypeDefinition) -> SExpr {
    let body = match &t.body {
        TypeBody::Product {
            fields: fs,
            invariant,
        } => make(
            "TYPE-DEFINER-PRODUCT",
            vec![(
                "GET",
                make(
                    "TYPE-PRODUCT",
                    vec![
                        ("FIELDS", fields(fs)),
                        ("INVARIANT", opt(invariant.as_ref().map(encode_expr))),
                    ],
                ),
            )],
        ),
        TypeBody::Sum { alternatives } => make(
            "TYPE-DEFINER-SUM",
            vec![(
                "GET",
                make(
                    "TYPE-SUM",
                    vec![(
                        "ALTERNATIVES",
                        list(
                            alternatives
                                .iter()
                                .map(|a| {
                                    make(
                                        "ALTERNATIVE",
                                        vec![
                                            ("NAME", encode_identifier(&a.name)),
                                            ("FIELDS", fields(&a.fields)),
                                        ],
                                    )
                                })
                                .collect(),
                        ),
                    )],
                ),
            )],
        ),
        TypeBody::Subtype {
            supertype,
            variable,
            restriction,
            witness,
        } => make(
            "TYPE-DEFINER-SUBSET",
            vec![(
                "GET",
                make(
                    "TYPE-SUBSET",
                    vec![
                        ("SUPERTYPE", encode_type(supertype)),
                        ("VARIABLE", encode_identifier(variable)),
                        ("RESTRICTION", encode_expr(restriction)),
                        ("WITNESS", opt(witness.as_ref().map(encode_expr))),
                    ],
                ),
            )],
        ),
    };
    make(
        "TYPE-DEFINITION",
        vec![("NAME", encode_identifier(&t.name)), ("BODY", body)],
    )
}

fn encode_header(h: &FunctionHeader) -> SExpr {
    make(
        "FUNCTION-HEADER",
        vec![
            ("NAME", encode_identifier(&h.name)),
            ("INPUTS", typed_vars(&h.inputs)),
            ("OUTPUTS", typed_vars(&h.outputs)),
        ],
    )
}

pub fn encode_function(f: &FunctionDefinition) -> SExpr {
    let definer = match &f.body {
        FunctionBody::Regular(e) => {
            make("FUNCTION-DEFINER-REGULAR", vec![("BODY", encode_expr(e))])
        }
        FunctionBody::Quantified {
            quantifier,
            bound,
            matrix,
        } => make(
            "FUNCTION-DEFINER-QUANTIFIED",
            vec![
                ("QUANTIFIER", encode_quantifier(*quantifier)),
                ("VARIABLES", typed_vars(bound)),
                ("MATRIX", encode_expr(matrix)),
            ],
        ),
    };
    make(
        "FUNCTION-DEFINITION",
        vec![
            ("HEADER", encode_header(&f.header)),
            (
                "PRECONDITION",
                opt(f.precondition.as_ref().map(encode_expr)),
            ),
            (
                "POSTCONDITION",
                opt(f.postcondition.as_ref().map(encode_expr)),
            ),
            ("DEFINER", definer),
        ],
    )
}

pub fn encode_type(t: &TypeExpr) -> SExpr {
    match t {
        TypeExpr::Bool => make("TYPE-BOOLEAN", vec![]),
        TypeExpr::Char => make("TYPE-CHARACTER", vec![]),
        TypeExpr::String => make("TYPE-STRING", vec![]),
        TypeExpr::Int => make("TYPE-INTEGER", vec![]),
        TypeExpr::Named(n) => make("TYPE-DEFINED", vec![("NAME", encode_identifier(n))]),
        TypeExpr::Option(b) => make("TYPE-OPTION", vec![("BASE", encode_type(b))]),
        TypeExpr::Set(b) => make("TYPE-SET", vec![("ELEMENT", encode_type(b))]),
        TypeExpr::Seq(b) => make("TYPE-SEQUENCE", vec![("ELEMENT", encode_type(b))]),
        TypeExpr::Map(k, v) => make(
            "TYPE-MAP",
            vec![("DOMAIN", encode_type(k)), ("RANGE", encode_type(v))],
        ),
        TypeExpr::Tuple(ts) => make(
            "TYPE-TUPLE",
            vec![("COMPONENTS", list(ts.iter().map(encode_type).collect()))],
        ),
    }
}

fn unary_op_name(op: UnaryOp) -> &'static str {
    match op {
        UnaryOp::Not => "NOT",
        UnaryOp::Neg => "MINUS",
    }
}

fn binary_op_name(op: BinaryOp) -> &'static str {
    match op {
        BinaryOp::Eq => "EQ",
        BinaryOp::Ne => "NE",
        BinaryOp::Lt => "LT",
        BinaryOp::Le => "LE",
        BinaryOp::Gt => "GT",
        BinaryOp::Ge => "GE",
        BinaryOp::Add => "ADD",
        BinaryOp::Sub => "SUB",
        BinaryOp::Mul => "MUL",
        BinaryOp::Div => "DIV",
        BinaryOp::Rem => "REM",
        BinaryOp::And => "AND",
        BinaryOp::Or => "OR",
        BinaryOp::Implies => "IMPLIES",
        BinaryOp::ImpliedBy => "IMPLIED",
        BinaryOp::Iff => "IFF",
    }
}

fn initializers(fs: &[(Identifier, Expression)]) -> SExpr {
    list(
        fs.iter()
            .map(|(n, e)| {
                make(
                    "INITIALIZER",
                    vec![("FIELD", encode_identifier(n)), ("VALUE", encode_expr(e))],
                )
            })
            .collect(),
    )
}

pub fn encode_expr(e: &Expression) -> SExpr {
    match e {
        Expression::Literal(l) => {
            let lit = match l {
                Literal::Bool(b) => make("LITERAL-BOOLEAN", vec![("VALUE", SExpr::bool(*b))]),
                Literal::Char(c) => make("LITERAL-CHARACTER", vec![("VALUE", SExpr::Char(*c))]),
                Literal::String(s) => {
                    make("LITERAL-STRING", vec![("VALUE", SExpr::String(s.clone()))])
                }
                Literal::Int(n) => make("LITERAL-INTEGER", vec![("VALUE", SExpr::Int(n.clone()))]),
            };
            make("EXPRESSION-LITERAL", vec![("GET", lit)])
        }
        Expression::Variable(v) => {
            make("EXPRESSION-VARIABLE", vec![("NAME", encode_identifier(v))])
        }
        Expression::Unary(op, x) => make(
            "EXPRESSION-UNARY",
            vec![
                (
                    "OPERATOR",
                    make(&format!("UNARY-OP-{}", unary_op_name(*op)), vec![]),
                ),
                ("OPERAND", encode_expr(x)),
            ],
        ),
        Expression::Binary(op, l, r) => make(
            "EXPRESSION-BINARY",
            vec![
                (
                    "OPERATOR",
                    make(&format!("BINARY-OP-{}", binary_op_name(*op)), vec![]),
                ),
                ("LEFT-OPERAND", encode_expr(l)),
                ("RIGHT-OPERAND", encode_expr(r)),
            ],
        ),
        Expression::Conditional {
            test,
            then,
            otherwise,
        } => make(
            "EXPRESSION-IF",
            vec![
                ("TEST", encode_expr(test)),
                ("THEN", encode_expr(then)),
                ("ELSE", encode_expr(otherwise)),
            ],
        ),
        Expression::Call(f, args) => make(
            "EXPRESSION-CALL",
            vec![
                ("FUNCTION", encode_identifier(f)),
                ("ARGUMENTS", list(args.iter().map(encode_expr).collect())),
            ],
        ),
        Expression::Bind { locals, body } => make(
            "EXPRESSION-BIND",
            vec![
                (
                    "BINDINGS",
                    list(
                        locals
                            .iter()
                            .map(|l| {
                                make(
                                    "LOCAL-BINDING",
                                    vec![
                                        ("NAME", encode_identifier(&l.name)),
                                        ("TYPE", encode_type(&l.ty)),
                                        ("VALUE", encode_expr(&l.value)),
                                    ],
                                )
                            })
                            .collect(),
                    ),
                ),
                ("BODY", encode_expr(body)),
            ],
        ),
        Expression::Tuple(es) => make(
            "EXPRESSION-MULTI",
            vec![("ARGUMENTS", list(es.iter().map(encode_expr).collect()))],
        ),
        Expression::TupleAccess(t, i) => make(
            "EXPRESSION-COMPONENT",
            vec![
                ("MULTI", encode_expr(t)),
                ("INDEX", SExpr::Int(BigInt::from(*i))),
            ],
        ),
        Expression::ProductConstruct { ty, fields } => make(
            "EXPRESSION-PRODUCT-CONSTRUCT",
            vec![
                ("TYPE", encode_identifier(ty)),
                ("FIELDS", initializers(fields)),
            ],
        ),
        Expression::ProductAccess(t, f) => make(
            "EXPRESSION-PRODUCT-FIELD",
            vec![("TARGET", encode_expr(t)), ("FIELD", encode_identifier(f))],
        ),
        Expression::ProductUpdate(t, fields) => make(
            "EXPRESSION-PRODUCT-UPDATE",
            vec![("TARGET", encode_expr(t)), ("FIELDS", initializers(fields))],
        ),
        Expression::SumConstruct {
            ty,
            alternative,
            fields,
        } => make(
            "EXPRESSION-SUM-CONSTRUCT",
            vec![
                ("TYPE", encode_identifier(ty)),
                ("ALTERNATIVE", encode_identifier(alternative)),
                ("FIELDS", initializers(fields)),
            ],
        ),
        Expression::SumTest(t, a) => make(
            "EXPRESSION-SUM-TEST",
            vec![
                ("TARGET", encode_expr(t)),
                ("ALTERNATIVE", encode_identifier(a)),
            ],
        ),
        Expression::SumAccess(t, a, f) => make(
            "EXPRESSION-SUM-FIELD",
            vec![
                ("TARGET", encode_expr(t)),
                ("ALTERNATIVE", encode_identifier(a)),
                ("FIELD", encode_identifier(f)),
            ],
        ),
        Expression::Some(x) => make("EXPRESSION-SOME", vec![("VALUE", encode_expr(x))]),
        Expression::None => make("EXPRESSION-NONE", vec![]),
        Expression::Empty(t) => make("EXPRESSION-EMPTY", vec![("TYPE", encode_type(t))]),
    }
}

// ---- decoding ---------------------------------------------------------

/// A constructor application split into its kind and keyword arguments.
pub(crate) struct Form<'a> {
    pub kind: &'a str,
    args: Vec<(&'a str, &'a SExpr)>,
    used: Vec<bool>,
}

impl<'a> Form<'a> {
    pub fn parse(s: &'a SExpr) -> Result<Form<'a>, DecodeError> {
        let items = s
            .as_list()
            .ok_or_else(|| malformed("a make-myself form", s))?;
        let (head, rest) = items
            .split_first()
            .ok_or_else(|| malformed("a make-myself form", s))?;
        let kind = match head {
            SExpr::Symbol { package, name } if package == PACKAGE => name
                .strip_prefix("MAKE-")
                .ok_or_else(|| DecodeError::UnknownConstructor(head.to_string()))?,
            _ => return Err(DecodeError::UnknownConstructor(head.to_string())),
        };
        if rest.len() % 2 != 0 {
            return Err(malformed("keyword/value pairs", s));
        }
        let mut args = Vec::new();
        for pair in rest.chunks(2) {
            match &pair[0] {
                SExpr::Keyword(k) => args.push((k.as_str(), &pair[1])),
                other => return Err(malformed("a keyword", other)),
            }
        }
        let used = vec![false; args.len()];
        Ok(Form { kind, args, used })
    }

    pub fn get(&mut self, key: &str) -> Result<&'a SExpr, DecodeError> {
        match self.args.iter().position(|(k, _)| *k == key) {
            Some(i) => {
                self.used[i] = true;
                Ok(self.args[i].1)
            }
            None => Err(DecodeError::MissingKeyword {
                head: self.kind.to_string(),
                keyword: key.to_string(),
            }),
        }
    }

    pub fn finish(self) -> Result<(), DecodeError> {
        match self.used.iter().position(|u| !u) {
            Some(i) => Err(DecodeError::UnexpectedKeyword {
                head: self.kind.to_string(),
                keyword: self.args[i].0.to_string(),
            }),
            None => Ok(()),
        }
    }

    pub fn unknown(&self) -> DecodeError {
        DecodeError::UnknownConstructor(format!("{PACKAGE}::MAKE-{}", self.kind))
    }
}

pub(crate) fn decode_list(s: &SExpr) -> Result<&[SExpr], DecodeError> {
    if s.is_nil() {
        return Ok(&[]);
    }
    match s.as_list() {
        Some([head, rest @ ..]) if head.is_symbol(super::sexpr::DEFAULT_PACKAGE, "LIST") => {
            Ok(rest)
        }
        _ => Err(malformed("(LIST ...) or NIL", s)),
    }
}

pub(crate) fn decode_bool(s: &SExpr) -> Result<bool, DecodeError> {
    if s.is_nil() {
        Ok(false)
    } else if s.is_symbol(super::sexpr::DEFAULT_PACKAGE, "T") {
        Ok(true)
    } else {
        Err(malformed("T or NIL", s))
    }
}

pub(crate) fn decode_string(s: &SExpr) -> Result<&str, DecodeError> {
    match s {
        SExpr::String(text) => Ok(text),
        _ => Err(malformed("a string", s)),
    }
}

fn decode_opt<T>(
    s: &SExpr,
    f: impl FnOnce(&SExpr) -> Result<T, DecodeError>,
) -> Result<Option<T>, DecodeError> {
    if s.is_nil() {
        Ok(None)
    } else {
        f(s).map(Some)
    }
}

fn decode_many<T>(
    s: &SExpr,
    f: impl Fn(&SExpr) -> Result<T, DecodeError>,
) -> Result<Vec<T>, DecodeError> {
    decode_list(s)?.iter().map(f).collect()
}

/// Reads a form that must be of exactly `kind`.
fn expect<'a>(s: &'a SExpr, kind: &str) -> Result<Form<'a>, DecodeError> {
    let f = Form::parse(s)?;
    if f.kind != kind {
        return Err(f.unknown());
    }
    Ok(f)
}

pub fn decode_identifier(s: &SExpr) -> Result<Identifier, DecodeError> {
    let mut f = expect(s, "IDENTIFIER")?;
    let name = decode_string(f.get("NAME")?)?;
    f.finish()?;
    Identifier::new(name).ok_or_else(|| malformed("a valid identifier", s))
}

pub fn decode_toplevel(s: &SExpr) -> Result<TopLevel, DecodeError> {
    let mut f = Form::parse(s)?;
    let get = f.get("GET")?;
    let unit = match f.kind {
        "TOPLEVEL-TYPE" => TopLevel::Type(decode_typedef(get)?),
        "TOPLEVEL-TYPES" => TopLevel::TypeClique(decode_many(get, decode_typedef)?),
        "TOPLEVEL-FUNCTION" => TopLevel::Function(decode_function(get)?),
        "TOPLEVEL-FUNCTIONS" => TopLevel::FunctionClique(decode_many(get, decode_function)?),
        "TOPLEVEL-SPECIFICATION" => {
            let mut s = expect(get, "FUNCTION-SPECIFICATION")?;
            let name = decode_identifier(s.get("NAME")?)?;
            let headers = decode_many(s.get("FUNCTIONS")?, decode_header)?;
            let mut b = Form::parse(s.get("BODY")?)?;
            let body = match b.kind {
                "FUNCTION-SPEC-REGULAR" => SpecBody::Plain(decode_expr(b.get("BODY")?)?),
                "FUNCTION-SPEC-QUANTIFIED" => SpecBody::Quantified {
                    quantifier: decode_quantifier(b.get("QUANTIFIER")?)?,
                    bound: decode_many(b.get("VARIABLES")?, decode_typed_var)?,
                    matrix: decode_expr(b.get("MATRIX")?)?,
                },
                "FUNCTION-SPEC-INPUT-OUTPUT" => {
                    SpecBody::IoRelation(decode_expr(b.get("RELATION")?)?)
                }
                _ => return Err(b.unknown()),
            };
            b.finish()?;
            s.finish()?;
            TopLevel::Specification(Specification {
                name,
                headers,
                body,
            })
        }
        "TOPLEVEL-THEOREM" => {
            let mut t = expect(get, "THEOREM")?;
            let th = Theorem {
                name: decode_identifier(t.get("NAME")?)?,
                variables: decode_many(t.get("VARIABLES")?, decode_typed_var)?,
                formula: decode_expr(t.get("FORMULA")?)?,
            };
            t.finish()?;
            TopLevel::Theorem(th)
        }
        "TOPLEVEL-TRANSFORMATION" => {
            let mut t = expect(get, "TRANSFORM")?;
            let new_name = decode_identifier(t.get("NEW-FUNCTION-NAME")?)?;
            let target = decode_identifier(t.get("OLD-FUNCTION-NAME")?)?;
            let tname = decode_string(t.get("TRANSFORM-NAME")?)?;
            let transform =
                Identifier::new(tname).ok_or_else(|| malformed("a transform name", get))?;
            let options = decode_many(t.get("ARGUMENTS")?, |a| {
                let mut a = expect(a, "TRANSFORM-ARGUMENT")?;
                let name = decode_identifier(a.get("NAME")?)?;
                let mut v = Form::parse(a.get("VALUE")?)?;
                let value = match v.kind {
                    "TRANSFORM-ARGUMENT-VALUE-IDENTIFIER" => {
                        OptionValue::Identifier(decode_identifier(v.get("NAME")?)?)
                    }
                    "TRANSFORM-ARGUMENT-VALUE-BOOL" => {
                        OptionValue::Bool(decode_bool(v.get("VAL")?)?)
                    }
                    "TRANSFORM-ARGUMENT-VALUE-TERM" => {
                        OptionValue::Expression(decode_expr(v.get("GET")?)?)
                    }
                    _ => return Err(v.unknown()),
                };
                v.finish()?;
                a.finish()?;
                Ok((name, value))
            })?;
            t.finish()?;
            TopLevel::Transform(TransformInvocation {
                new_name,
                target,
                transform,
                options,
            })
        }
        _ => return Err(f.unknown()),
    };
    f.finish()?;
    Ok(unit)
}

fn decode_quantifier(s: &SExpr) -> Result<Quantifier, DecodeError> {
    let f = Form::parse(s)?;
    let q = match f.kind {
        "QUANTIFIER-FORALL" => Quantifier::Forall,
        "QUANTIFIER-EXISTS" => Quantifier::Exists,
        _ => return Err(f.unknown()),
    };
    f.finish()?;
    Ok(q)
}

fn decode_named(s: &SExpr, kind: &str) -> Result<TypedName, DecodeError> {
    let mut f = expect(s, kind)?;
    let t = TypedName {
        name: decode_identifier(f.get("NAME")?)?,
        ty: decode_type(f.get("TYPE")?)?,
    };
    f.finish()?;
    Ok(t)
}

fn decode_typed_var(s: &SExpr) -> Result<TypedName, DecodeError> {
    decode_named(s, "TYPED-VARIABLE")
}

fn decode_field(s: &SExpr) -> Result<TypedName, DecodeError> {
    decode_named(s, "FIELD")
}

pub fn decode_typedef(s: &SExpr) -> Result<TypeDefinition, DecodeError> {
    let mut f = expect(s, "TYPE-DEFINITION")?;
    let name = decode_identifier(f.get("NAME")?)?;
    let mut d = Form::parse(f.get("BODY")?)?;
    let get = d.get("GET")?;
    let body = match d.kind {
        "TYPE-DEFINER-PRODUCT" => {
            let mut p = expect(get, "TYPE-PRODUCT")?;
            let body = TypeBody::Product {
                fields: decode_many(p.get("FIELDS")?, decode_field)?,
                invariant: decode_opt(p.get("INVARIANT")?, decode_expr)?,
            };
            p.finish()?;
            body
        }
        "TYPE-DEFINER-SUM" => {
            let mut p = expect(get, "TYPE-SUM")?;
            let alternatives = decode_many(p.get("ALTERNATIVES")?, |a| {
                let mut a = expect(a, "ALTERNATIVE")?;
                let alt = Alternative {
                    name: decode_identifier(a.get("NAME")?)?,
                    fields: decode_many(a.get("FIELDS")?, decode_field)?,
                };
                a.finish()?;
                Ok(alt)
            })?;
            p.finish()?;
            TypeBody::Sum { alternatives }
        }
        "TYPE-DEFINER-SUBSET" => {
            let mut p = expect(get, "TYPE-SUBSET")?;
            let body = TypeBody::Subtype {
                supertype: decode_type(p.get("SUPERTYPE")?)?,
                variable: decode_identifier(p.get("VARIABLE")?)?,
                restriction: decode_expr(p.get("RESTRICTION")?)?,
                witness: decode_opt(p.get("WITNESS")?, decode_expr)?,
            };
            p.finish()?;
            body
        }
        _ => return Err(d.unknown()),
    };
    d.finish()?;
    f.finish()?;
    Ok(TypeDefinition { name, body })
}

fn decode_header(s: &SExpr) -> Result<FunctionHeader, DecodeError> {
    let mut f = expect(s, "FUNCTION-HEADER")?;
    let h = FunctionHeader {
        name: decode_identifier(f.get("NAME")?)?,
        inputs: decode_many(f.get("INPUTS")?, decode_typed_var)?,
        outputs: decode_many(f.get("OUTPUTS")?, decode_typed_var)?,
    };
    f.finish()?;
    Ok(h)
}

pub fn decode_function(s: &SExpr) -> Result<FunctionDefinition, DecodeError> {
    let mut f = expect(s, "FUNCTION-DEFINITION")?;
    let header = decode_header(f.get("HEADER")?)?;
    let precondition = decode_opt(f.get("PRECONDITION")?, decode_expr)?;
    let postcondition = decode_opt(f.get("POSTCONDITION")?, decode_expr)?;
    let mut d = Form::parse(f.get("DEFINER")?)?;
    let body = match d.kind {
        "FUNCTION-DEFINER-REGULAR" => FunctionBody::Regular(decode_expr(d.get("BODY")?)?),
        "FUNCTION-DEFINER-QUANTIFIED" => FunctionBody::Quantified {
            quantifier: decode_quantifier(d.get("QUANTIFIER")?)?,
            bound: decode_many(d.get("VARIABLES")?, decode_typed_var)?,
            matrix: decode_expr(d.get("MATRIX")?)?,
        },
        _ => return Err(d.unknown()),
    };
    d.finish()?;
    f.finish()?;
    Ok(FunctionDefinition {
        header,
        precondition,
        postcondition,
        body,
    })
}

pub fn decode_type(s: &SExpr) -> Result<TypeExpr, DecodeError> {
    let mut f = Form::parse(s)?;
    let t = match f.kind {
        "TYPE-BOOLEAN" => TypeExpr::Bool,
        "TYPE-CHARACTER" => TypeExpr::Char,
        "TYPE-STRING" => TypeExpr::String,
        "TYPE-INTEGER" => TypeExpr::Int,
        "TYPE-DEFINED" => TypeExpr::Named(decode_identifier(f.get("NAME")?)?),
        "TYPE-OPTION" => TypeExpr::option(decode_type(f.get("BASE")?)?),
        "TYPE-SET" => TypeExpr::set(decode_type(f.get("ELEMENT")?)?),
        "TYPE-SEQUENCE" => TypeExpr::seq(decode_type(f.get("ELEMENT")?)?),
        "TYPE-MAP" => TypeExpr::map(
            decode_type(f.get("DOMAIN")?)?,
            decode_type(f.get("RANGE")?)?,
        ),
        "TYPE-TUPLE" => TypeExpr::Tuple(decode_many(f.get("COMPONENTS")?, decode_type)?),
        _ => return Err(f.unknown()),
    };
    f.finish()?;
    Ok(t)
}

fn decode_initializers(s: &SExpr) -> Result<Vec<(Identifier, Expression)>, DecodeError> {
    decode_many(s, |i| {
        let mut i = expect(i, "INITIALIZER")?;
        let out = (
            decode_identifier(i.get("FIELD")?)?,
            decode_expr(i.get("VALUE")?)?,
        );
        i.finish()?;
        Ok(out)
    })
}

fn decode_op<T: Copy>(
    s: &SExpr,
    prefix: &str,
    ops: &[T],
    name: fn(T) -> &'static str,
) -> Result<T, DecodeError> {
    let f = Form::parse(s)?;
    let op = f
        .kind
        .strip_prefix(prefix)
        .and_then(|n| ops.iter().copied().find(|op| name(*op) == n))
        .ok_or_else(|| f.unknown())?;
    f.finish()?;
    Ok(op)
}

pub fn decode_expr(s: &SExpr) -> Result<Expression, DecodeError> {
    let mut f = Form::parse(s)?;
    let e = match f.kind {
        "EXPRESSION-LITERAL" => {
            let mut l = Form::parse(f.get("GET")?)?;
            let v = l.get("VALUE")?;
            let lit = match (l.kind, v) {
                ("LITERAL-BOOLEAN", v) => Literal::Bool(decode_bool(v)?),
                ("LITERAL-CHARACTER", SExpr::Char(c)) => Literal::Char(*c),
                ("LITERAL-STRING", SExpr::String(text)) => {
                    if text.chars().any(|c| c as u32 > 0xFF) {
                        return Err(malformed("an ISO 8859-1 string", v));
                    }
                    Literal::String(text.clone())
                }
                ("LITERAL-INTEGER", SExpr::Int(n)) => Literal::Int(n.clone()),
                _ => return Err(l.unknown()),
            };
            l.finish()?;
            Expression::Literal(lit)
        }
        "EXPRESSION-VARIABLE" => Expression::Variable(decode_identifier(f.get("NAME")?)?),
        "EXPRESSION-UNARY" => {
            let op = decode_op(
                f.get("OPERATOR")?,
                "UNARY-OP-",
                &[UnaryOp::Not, UnaryOp::Neg],
                unary_op_name,
            )?;
            Expression::Unary(op, Box::new(decode_expr(f.get("OPERAND")?)?))
        }
        "EXPRESSION-BINARY" => {
            let op = decode_op(
                f.get("OPERATOR")?,
                "BINARY-OP-",
                &BinaryOp::ALL,
                binary_op_name,
            )?;
            Expression::binary(
                op,
                decode_expr(f.get("LEFT-OPERAND")?)?,
                decode_expr(f.get("RIGHT-OPERAND")?)?,
            )
        }
        "EXPRESSION-IF" => Expression::cond(
            decode_expr(f.get("TEST")?)?,
            decode_expr(f.get("THEN")?)?,
            decode_expr(f.get("ELSE")?)?,
        ),
        "EXPRESSION-CALL" => Expression::Call(
            decode_identifier(f.get("FUNCTION")?)?,
            decode_many(f.get("ARGUMENTS")?, decode_expr)?,
        ),
        "EXPRESSION-BIND" => {
            let locals = decode_many(f.get("BINDINGS")?, |b| {
                let mut b = expect(b, "LOCAL-BINDING")?;
                let l = LocalBinding {
                    name: decode_identifier(b.get("NAME")?)?,
                    ty: decode_type(b.get("TYPE")?)?,
                    value: decode_expr(b.get("VALUE")?)?,
                };
                b.finish()?;
                Ok(l)
            })?;
            Expression::Bind {
                locals,
                body: Box::new(decode_expr(f.get("BODY")?)?),
            }
        }
        "EXPRESSION-MULTI" => Expression::Tuple(decode_many(f.get("ARGUMENTS")?, decode_expr)?),
        "EXPRESSION-COMPONENT" => {
            let t = decode_expr(f.get("MULTI")?)?;
            let idx = f.get("INDEX")?;
            let i = match idx {
                SExpr::Int(n) => n.to_usize(),
                _ => None,
            }
            .ok_or_else(|| malformed("a component index", idx))?;
            Expression::TupleAccess(Box::new(t), i)
        }
        "EXPRESSION-PRODUCT-CONSTRUCT" => Expression::ProductConstruct {
            ty: decode_identifier(f.get("TYPE")?)?,
            fields: decode_initializers(f.get("FIELDS")?)?,
        },
        "EXPRESSION-PRODUCT-FIELD" => Expression::ProductAccess(
            Box::new(decode_expr(f.get("TARGET")?)?),
            decode_identifier(f.get("FIELD")?)?,
        ),
        "EXPRESSION-PRODUCT-UPDATE" => Expression::ProductUpdate(
            Box::new(decode_expr(f.get("TARGET")?)?),
            decode_initializers(f.get("FIELDS")?)?,
        ),
        "EXPRESSION-SUM-CONSTRUCT" => Expression::SumConstruct {
            ty: decode_identifier(f.get("TYPE")?)?,
            alternative: decode_identifier(f.get("ALTERNATIVE")?)?,
            fields: decode_initializers(f.get("FIELDS")?)?,
        },
        "EXPRESSION-SUM-TEST" => Expression::SumTest(
            Box::new(decode_expr(f.get("TARGET")?)?),
            decode_identifier(f.get("ALTERNATIVE")?)?,
        ),
        "EXPRESSION-SUM-FIELD" => Expression::SumAccess(
            Box::new(decode_expr(f.get("TARGET")?)?),
            decode_identifier(f.get("ALTERNATIVE")?)?,
            decode_identifier(f.get("FIELD")?)?,
        ),
        "EXPRESSION-SOME" => Expression::Some(Box::new(decode_expr(f.get("VALUE")?)?)),
        "EXPRESSION-NONE" => Expression::None,
        "EXPRESSION-EMPTY" => Expression::Empty(decode_type(f.get("TYPE")?)?),
        _ => return Err(f.unknown()),
    };
    f.finish()?;
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::super::sexpr::{normalize_whitespace, parse_sexpr, serialize};
    use super::*;

    const POSITIVE_FORM: &str = r#"(SYNTHETO::PROCESS-SYNTHETO-TOPLEVEL
 (SYNTHETO::MAKE-TOPLEVEL-TYPE
  :GET (SYNTHETO::MAKE-TYPE-DEFINITION
        :NAME (SYNTHETO::MAKE-IDENTIFIER :NAME "positive")
        :BODY (SYNTHETO::MAKE-TYPE-DEFINER-SUBSET
               :GET (SYNTHETO::MAKE-TYPE-SUBSET
                     :SUPERTYPE (SYNTHETO::MAKE-TYPE-INTEGER)
                     :VARIABLE (SYNTHETO::MAKE-IDENTIFIER :NAME "x")
                     :RESTRICTION
                     (SYNTHETO::MAKE-EXPRESSION-BINARY
                      :OPERATOR (SYNTHETO::MAKE-BINARY-OP-GT)
                      :LEFT-OPERAND
                      (SYNTHETO::MAKE-EXPRESSION-VARIABLE
                       :NAME (SYNTHETO::MAKE-IDENTIFIER :NAME "x"))
                      :RIGHT-OPERAND
                      (SYNTHETO::MAKE-EXPRESSION-LITERAL
                       :GET (SYNTHETO::MAKE-LITERAL-INTEGER :VALUE 0)))
                     :WITNESS NIL)))))"#;

    #[test]
    fn positive_subtype_matches_listing() {
        let u = parse_program("subtype positive {\n  x: int | x > 0\n}")
            .unwrap()
            .remove(0);
        let text = serialize(&ast_to_transfer(&u)).unwrap();
        assert_eq!(text, normalize_whitespace(POSITIVE_FORM));
        let back = transfer_to_ast(&parse_sexpr(POSITIVE_FORM).unwrap()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn unknown_head_rejected() {
        let s =
            parse_sexpr("(SYNTHETO::PROCESS-SYNTHETO-TOPLEVEL (SYNTHETO::MAKE-BOGUS :GET NIL))")
                .unwrap();
        assert!(matches!(
            transfer_to_ast(&s),
            Err(DecodeError::UnknownConstructor(_))
        ));
    }

    #[test]
    fn extra_keyword_rejected() {
        let s = parse_sexpr(
            "(SYNTHETO::MAKE-EXPRESSION-VARIABLE :NAME (SYNTHETO::MAKE-IDENTIFIER :NAME \"x\") :X 1)",
        )
        .unwrap();
        assert!(matches!(
            decode_expr(&s),
            Err(DecodeError::UnexpectedKeyword { .. })
        ));
    }
}
