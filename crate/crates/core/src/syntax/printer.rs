//! Canonical source layout. Output reparses to the same AST.

use std::fmt::{self, Write};

use num_traits::Signed;

use super::ast::*;
use super::lexer::escape_char;

const INDENT: &str = "  ";

/// Context levels: 0 admits a conditional, 1..=7 binary operators of at
/// least that precedence, 8 a unary operand, 9 a postfix operand.
const UNARY: u8 = 8;
const POSTFIX: u8 = 9;

pub fn print_toplevel(unit: &TopLevel) -> String {
    let mut out = String::new();
    match unit {
        TopLevel::Type(t) => type_definition(&mut out, t),
        TopLevel::TypeClique(ts) => {
            out.push_str("types {\n");
            for t in ts {
                let mut inner = String::new();
                type_definition(&mut inner, t);
                push_indented(&mut out, &inner, 1);
                out.push('\n');
            }
            out.push('}');
        }
        TopLevel::Function(f) => function(&mut out, f),
        TopLevel::FunctionClique(fs) => {
            out.push_str("functions {\n");
            for f in fs {
                let mut inner = String::new();
                function(&mut inner, f);
                push_indented(&mut out, &inner, 1);
                out.push('\n');
            }
            out.push('}');
        }
        TopLevel::Specification(s) => specification(&mut out, s),
        TopLevel::Theorem(t) => {
            let _ = writeln!(out, "theorem {}", t.name);
            let _ = writeln!(out, "{INDENT}forall({})", typed_names(&t.variables));
            let _ = write!(out, "{INDENT}{INDENT}{}", print_expression(&t.formula));
        }
        TopLevel::Transform(t) => {
            let _ = write!(
                out,
                "function {} =\n{INDENT}transform {}\n{INDENT}{INDENT}by {}",
                t.new_name, t.target, t.transform
            );
            if !t.options.is_empty() {
                let opts: Vec<String> = t
                    .options
                    .iter()
                    .map(|(n, v)| {
                        let v = match v {
                            OptionValue::Identifier(i) => i.to_string(),
                            OptionValue::Bool(b) => b.to_string(),
                            OptionValue::Expression(e) => print_expression(e),
                        };
                        format!("{n} = {v}")
                    })
                    .collect();
                let _ = write!(out, " {{{}}}", opts.join(", "));
            }
        }
    }
    out
}

/// Every unit separated by a blank line.
pub fn print_program(units: &[TopLevel]) -> String {
    let parts: Vec<String> = units.iter().map(print_toplevel).collect();
    let mut s = parts.join("\n\n");
    s.push('\n');
    s
}

fn push_indented(out: &mut String, text: &str, levels: usize) {
    let pad = INDENT.repeat(levels);
    for (i, line) in text.lines().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        if !line.is_empty() {
            out.push_str(&pad);
        }
        out.push_str(line);
    }
}

fn typed_names(names: &[TypedName]) -> String {
    names
        .iter()
        .map(|n| format!("{}: {}", n.name, print_type(&n.ty)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn type_definition(out: &mut String, t: &TypeDefinition) {
    match &t.body {
        TypeBody::Product { fields, invariant } => {
            let _ = writeln!(out, "struct {} {{", t.name);
            let lines: Vec<String> = fields
                .iter()
                .map(|f| format!("{INDENT}{}: {}", f.name, print_type(&f.ty)))
                .collect();
            out.push_str(&lines.join(",\n"));
            if let Some(inv) = invariant {
                let _ = write!(out, "\n{INDENT}| {}", print_expression(inv));
            }
            out.push_str("\n}");
        }
        TypeBody::Sum { alternatives } => {
            let _ = write!(out, "variant {} {{", t.name);
            if alternatives.is_empty() {
                out.push('}');
                return;
            }
            out.push('\n');
            let lines: Vec<String> = alternatives
                .iter()
                .map(|a| {
                    if a.fields.is_empty() {
                        format!("{INDENT}{}", a.name)
                    } else {
                        format!("{INDENT}{}({})", a.name, typed_names(&a.fields))
                    }
                })
                .collect();
            out.push_str(&lines.join(",\n"));
            out.push_str("\n}");
        }
        TypeBody::Subtype {
            supertype,
            variable,
            restriction,
            witness,
        } => {
            let _ = write!(
                out,
                "subtype {} {{\n{INDENT}{}: {} | {}",
                t.name,
                variable,
                print_type(supertype),
                print_expression(restriction)
            );
            if let Some(w) = witness {
                let _ = write!(out, " witness {}", print_expression(w));
            }
            out.push_str("\n}");
        }
    }
}

fn header(out: &mut String, h: &FunctionHeader, pre: Option<&Expression>) {
    let _ = write!(out, "function {}({})", h.name, typed_names(&h.inputs));
    match pre {
        Some(p) => {
            let _ = write!(
                out,
                "\n{INDENT}assumes {}\n{INDENT}returns ({})",
                print_expression(p),
                typed_names(&h.outputs)
            );
        }
        None => {
            let _ = write!(out, " returns ({})", typed_names(&h.outputs));
        }
    }
}

fn function(out: &mut String, f: &FunctionDefinition) {
    header(out, &f.header, f.precondition.as_ref());
    if let Some(post) = &f.postcondition {
        let _ = write!(out, " ensures {}", print_expression(post));
    }
    out.push_str(" {\n");
    match &f.body {
        FunctionBody::Regular(e) => statements(out, e, 1),
        FunctionBody::Quantified {
            quantifier,
            bound,
            matrix,
        } => {
            let _ = write!(
                out,
                "{INDENT}{}({}) {}",
                quantifier.keyword(),
                typed_names(bound),
                print_expression(matrix)
            );
        }
    }
    out.push_str("\n}");
}

fn specification(out: &mut String, s: &Specification) {
    let headers: Vec<String> = s
        .headers
        .iter()
        .map(|h| {
            let mut t = String::new();
            header(&mut t, h, None);
            t
        })
        .collect();
    let _ = write!(out, "specification {}\n{INDENT}(", s.name);
    out.push_str(&headers.join(&format!(",\n{INDENT} ")));
    out.push_str(") {\n");
    match &s.body {
        SpecBody::Plain(e) | SpecBody::IoRelation(e) => {
            let _ = write!(out, "{INDENT}{};", print_expression(e));
        }
        SpecBody::Quantified {
            quantifier,
            bound,
            matrix,
        } => {
            let _ = write!(
                out,
                "{INDENT}{}({}) {};",
                quantifier.keyword(),
                typed_names(bound),
                print_expression(matrix)
            );
        }
    }
    out.push_str("\n}");
}

/// Statement layout of a block body (without the braces).
fn statements(out: &mut String, e: &Expression, depth: usize) {
    let pad = INDENT.repeat(depth);
    match e {
        Expression::Bind { locals, body } => {
            let _ = writeln!(out, "{pad}let {};", let_bindings(locals));
            statements(out, body, depth);
        }
        Expression::Conditional { .. } => {
            out.push_str(&pad);
            if_statement(out, e, depth);
        }
        e => {
            let _ = write!(out, "{pad}return {};", print_expression(e));
        }
    }
}

fn if_statement(out: &mut String, e: &Expression, depth: usize) {
    let Expression::Conditional {
        test,
        then,
        otherwise,
    } = e
    else {
        unreachable!()
    };
    let pad = INDENT.repeat(depth);
    let _ = writeln!(out, "if ({}) {{", print_expression(test));
    statements(out, then, depth + 1);
    let _ = write!(out, "\n{pad}}} else ");
    if matches!(**otherwise, Expression::Conditional { .. }) {
        if_statement(out, otherwise, depth);
    } else {
        out.push_str("{\n");
        statements(out, otherwise, depth + 1);
        let _ = write!(out, "\n{pad}}}");
    }
}

fn let_bindings(locals: &[LocalBinding]) -> String {
    locals
        .iter()
        .map(|l| {
            format!(
                "{}: {} = {}",
                l.name,
                print_type(&l.ty),
                print_expression(&l.value)
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn print_type(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Bool => "bool".into(),
        TypeExpr::Char => "char".into(),
        TypeExpr::String => "string".into(),
        TypeExpr::Int => "int".into(),
        TypeExpr::Named(n) => n.to_string(),
        TypeExpr::Option(t) => format!("opt<{}>", print_type(t)),
        TypeExpr::Set(t) => format!("set<{}>", print_type(t)),
        TypeExpr::Seq(t) => format!("seq<{}>", print_type(t)),
        TypeExpr::Map(k, v) => format!("map<{}, {}>", print_type(k), print_type(v)),
        TypeExpr::Tuple(ts) if ts.len() == 1 => format!("({},)", print_type(&ts[0])),
        TypeExpr::Tuple(ts) => format!(
            "({})",
            ts.iter().map(print_type).collect::<Vec<_>>().join(", ")
        ),
    }
}

pub fn print_expression(e: &Expression) -> String {
    let mut out = String::new();
    expr(&mut out, e, 0);
    out
}

fn field_inits(fields: &[(Identifier, Expression)]) -> String {
    fields
        .iter()
        .map(|(n, e)| format!("{n} = {}", print_expression(e)))
        .collect::<Vec<_>>()
        .join(", ")
}

fn expr(out: &mut String, e: &Expression, level: u8) {
    match e {
        Expression::Literal(Literal::Int(n)) if n.is_negative() && level > UNARY => {
            let _ = write!(out, "({n})");
        }
        Expression::Literal(l) => literal(out, l),
        Expression::Variable(v) => out.push_str(v),
        Expression::Unary(op, inner) => {
            let wrap = level > UNARY;
            if wrap {
                out.push('(');
            }
            match op {
                UnaryOp::Not => out.push('!'),
                UnaryOp::Neg => out.push('-'),
            }
            match (op, &**inner) {
                (UnaryOp::Neg, Expression::Literal(Literal::Int(n))) if !n.is_negative() => {
                    let _ = write!(out, "({n})");
                }
                (UnaryOp::Neg, Expression::Literal(Literal::Int(_)))
                | (UnaryOp::Neg, Expression::Unary(UnaryOp::Neg, _)) => {
                    out.push(' ');
                    expr(out, inner, UNARY);
                }
                _ => expr(out, inner, UNARY),
            }
            if wrap {
                out.push(')');
            }
        }
        Expression::Binary(op, l, r) => {
            let p = op.precedence();
            let wrap = level > p;
            if wrap {
                out.push('(');
            }
            let (lp, rp) = if op.right_assoc() {
                (p + 1, p)
            } else {
                (p, p + 1)
            };
            expr(out, l, lp);
            let _ = write!(out, " {} ", op.symbol());
            expr(out, r, rp);
            if wrap {
                out.push(')');
            }
        }
        Expression::Conditional {
            test,
            then,
            otherwise,
        } => {
            let wrap = level > 0;
            if wrap {
                out.push('(');
            }
            expr(out, test, 1);
            out.push_str(" ? ");
            expr(out, then, 0);
            out.push_str(" : ");
            expr(out, otherwise, 0);
            if wrap {
                out.push(')');
            }
        }
        Expression::Call(f, args) => {
            let args: Vec<String> = args.iter().map(print_expression).collect();
            let _ = write!(out, "{f}({})", args.join(", "));
        }
        Expression::Bind { .. } => {
            out.push_str("{ ");
            inline_block(out, e);
            out.push_str(" }");
        }
        Expression::Tuple(es) => {
            let parts: Vec<String> = es.iter().map(print_expression).collect();
            if parts.len() == 1 {
                let _ = write!(out, "({},)", parts[0]);
            } else {
                let _ = write!(out, "({})", parts.join(", "));
            }
        }
        Expression::TupleAccess(t, i) => {
            expr(out, t, POSTFIX);
            let _ = write!(out, ".{i}");
        }
        Expression::ProductConstruct { ty, fields } => {
            let _ = write!(out, "{ty}({})", field_inits(fields));
        }
        Expression::ProductAccess(t, f) => {
            expr(out, t, POSTFIX);
            let _ = write!(out, ".{f}");
        }
        Expression::ProductUpdate(t, fields) => {
            expr(out, t, POSTFIX);
            let _ = write!(out, " with ({})", field_inits(fields));
        }
        Expression::SumConstruct {
            ty,
            alternative,
            fields,
        } => {
            let _ = write!(out, "{ty}::{alternative}({})", field_inits(fields));
        }
        Expression::SumTest(t, alt) => {
            expr(out, t, POSTFIX);
            let _ = write!(out, " is {alt}");
        }
        Expression::SumAccess(t, alt, f) => {
            expr(out, t, POSTFIX);
            let _ = write!(out, ".{alt}::{f}");
        }
        Expression::Some(inner) => {
            let _ = write!(out, "some({})", print_expression(inner));
        }
        Expression::None => out.push_str("none"),
        Expression::Empty(t) => {
            let _ = write!(out, "empty<{}>", print_type(t));
        }
    }
}

/// `let a: T = v; ... return e;` on one line.
fn inline_block(out: &mut String, e: &Expression) {
    match e {
        Expression::Bind { locals, body } => {
            let _ = write!(out, "let {}; ", let_bindings(locals));
            inline_block(out, body);
        }
        e => {
            let _ = write!(out, "return {};", print_expression(e));
        }
    }
}

fn literal(out: &mut String, l: &Literal) {
    match l {
        Literal::Bool(b) => {
            let _ = write!(out, "{b}");
        }
        Literal::Int(n) => {
            let _ = write!(out, "{n}");
        }
        Literal::Char(c) => {
            let _ = write!(out, "'{}'", escape_char(*c, '\''));
        }
        Literal::String(s) => {
            out.push('"');
            for ch in s.chars() {
                out.push_str(&escape_char(ch as u32 as u8, '"'));
            }
            out.push('"');
        }
    }
}

impl fmt::Display for TypeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_type(self))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expression(self))
    }
}

impl fmt::Display for TopLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_toplevel(self))
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::{parse_expression, parse_program};
    use super::*;

    #[test]
    fn positive_subtype_layout() {
        let u = &parse_program("subtype positive {x: int | x > 0}").unwrap()[0];
        assert_eq!(print_toplevel(u), "subtype positive {\n  x: int | x > 0\n}");
    }

    #[test]
    fn tuple_type() {
        let t = TypeExpr::Tuple(vec![TypeExpr::Int, TypeExpr::Bool]);
        assert_eq!(print_type(&t), "(int, bool)");
    }

    #[test]
    fn minimal_parentheses_reparse() {
        for src in [
            "(a ? b : c) ? d : e",
            "a ==> b ==> c",
            "(a ==> b) ==> c",
            "a - (b - c)",
            "-(5)",
            "- -5",
            "-(-x)",
            "!(a && b)",
            "(a + b).0",
            "{ let x: int = 1, y: int = 2; return x + y; } * 2",
            "(x,)",
            "f((c ? 1 : 0) + count)",
        ] {
            let e = parse_expression(src).unwrap();
            let printed = print_expression(&e);
            assert_eq!(parse_expression(&printed).unwrap(), e, "{src} -> {printed}");
        }
    }

    #[test]
    fn statement_layout() {
        let src = "function f(n: int) returns (m: int) { let k: int = n; if (k == 0) { return 1; } else if (k == 1) { return 2; } else { return 3; } }";
        let u = &parse_program(src).unwrap()[0];
        let printed = print_toplevel(u);
        assert_eq!(
            printed,
            "function f(n: int) returns (m: int) {\n  let k: int = n;\n  if (k == 0) {\n    return 1;\n  } else if (k == 1) {\n    return 2;\n  } else {\n    return 3;\n  }\n}"
        );
        assert_eq!(&parse_program(&printed).unwrap()[0], u);
    }
}
