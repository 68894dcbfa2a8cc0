//! Recursive-descent parser producing [`TopLevel`] units.

use std::ops::Range;

use num_bigint::BigInt;
use thiserror::Error;

use super::ast::*;
use super::lexer::{line_col, tokenize, Keyword, Punct, Spanned, Token};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{line}:{column}: expected {}, found {found}", expected.join(" or "))]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
    pub expected: Vec<String>,
    pub found: String,
}

pub fn parse_program(src: &str) -> Result<Vec<TopLevel>, ParseError> {
    Ok(parse_program_with_spans(src)?
        .into_iter()
        .map(|(u, _)| u)
        .collect())
}

/// Like [`parse_program`], also returning each unit's byte range.
pub fn parse_program_with_spans(src: &str) -> Result<Vec<(TopLevel, Range<usize>)>, ParseError> {
    let tokens = tokenize(src).map_err(|e| {
        let (line, column) = line_col(src, e.offset);
        ParseError {
            line,
            column,
            offset: e.offset,
            expected: vec!["a token".into()],
            found: e.message,
        }
    })?;
    let mut p = Parser {
        src,
        tokens,
        pos: 0,
    };
    let mut out = Vec::new();
    loop {
        while p.eat_punct(Punct::Semi) {}
        if p.peek() == &Token::Eof {
            break;
        }
        let start = p.tokens[p.pos].start;
        let unit = p.toplevel()?;
        let end = p.tokens[p.pos - 1].end;
        out.push((unit, start..end));
    }
    Ok(out)
}

/// Parses a single expression (the whole input must be consumed).
pub fn parse_expression(src: &str) -> Result<Expression, ParseError> {
    let tokens = tokenize(src).map_err(|e| {
        let (line, column) = line_col(src, e.offset);
        ParseError {
            line,
            column,
            offset: e.offset,
            expected: vec!["a token".into()],
            found: e.message,
        }
    })?;
    let mut p = Parser {
        src,
        tokens,
        pos: 0,
    };
    let e = p.expr()?;
    if p.peek() != &Token::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(e)
}

/// Parses a type expression.
pub fn parse_type(src: &str) -> Result<TypeExpr, ParseError> {
    let tokens = tokenize(src).map_err(|e| ParseError {
        line: 1,
        column: e.offset + 1,
        offset: e.offset,
        expected: vec!["a token".into()],
        found: e.message,
    })?;
    let mut p = Parser {
        src,
        tokens,
        pos: 0,
    };
    let t = p.ty()?;
    if p.peek() != &Token::Eof {
        return Err(p.error(&["end of input"]));
    }
    Ok(t)
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].token
    }

    fn peek_at(&self, k: usize) -> &Token {
        let i = (self.pos + k).min(self.tokens.len() - 1);
        &self.tokens[i].token
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].token.clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    /// Undoes a [`Parser::bump`] that returned `t`.
    fn unbump(&mut self, t: &Token) {
        if t != &Token::Eof {
            self.pos -= 1;
        }
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let offset = self.tokens[self.pos].start;
        let (line, column) = line_col(self.src, offset);
        ParseError {
            line,
            column,
            offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().to_string(),
        }
    }

    fn is_punct(&self, p: Punct) -> bool {
        self.peek() == &Token::Punct(p)
    }

    fn is_kw(&self, k: Keyword) -> bool {
        self.peek() == &Token::Keyword(k)
    }

    fn eat_punct(&mut self, p: Punct) -> bool {
        let hit = self.is_punct(p);
        if hit {
            self.bump();
        }
        hit
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        let hit = self.is_kw(k);
        if hit {
            self.bump();
        }
        hit
    }

    fn expect_punct(&mut self, p: Punct) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{}`", p.as_str())]))
        }
    }

    fn expect_kw(&mut self, k: Keyword) -> PResult<()> {
        if self.eat_kw(k) {
            Ok(())
        } else {
            Err(self.error(&[&format!("`{}`", k.as_str())]))
        }
    }

    fn ident(&mut self) -> PResult<Identifier> {
        match self.peek() {
            Token::Ident(s) => {
                let id = Identifier::new(s.clone()).expect("lexer yields valid identifiers");
                self.bump();
                Ok(id)
            }
            _ => Err(self.error(&["identifier"])),
        }
    }

    /// `a, b, c` terminated by `close` (consumed); trailing comma allowed.
    fn comma_list<T>(
        &mut self,
        close: Punct,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut out = Vec::new();
        loop {
            if self.eat_punct(close) {
                return Ok(out);
            }
            out.push(item(self)?);
            if !self.eat_punct(Punct::Comma) {
                self.expect_punct(close)?;
                return Ok(out);
            }
        }
    }

    fn typed_name(&mut self) -> PResult<TypedName> {
        let name = self.ident()?;
        self.expect_punct(Punct::Colon)?;
        let ty = self.ty()?;
        Ok(TypedName { name, ty })
    }

    fn typed_names(&mut self) -> PResult<Vec<TypedName>> {
        self.expect_punct(Punct::LParen)?;
        self.comma_list(Punct::RParen, |p| p.typed_name())
    }

    // ---- types -------------------------------------------------------

    fn ty(&mut self) -> PResult<TypeExpr> {
        let t = self.bump();
        match t {
            Token::Keyword(Keyword::Int) => Ok(TypeExpr::Int),
            Token::Keyword(Keyword::Bool) => Ok(TypeExpr::Bool),
            Token::Keyword(Keyword::Char) => Ok(TypeExpr::Char),
            Token::Keyword(Keyword::String) => Ok(TypeExpr::String),
            Token::Keyword(k @ (Keyword::Seq | Keyword::Set | Keyword::Opt)) => {
                self.expect_punct(Punct::Lt)?;
                let inner = Box::new(self.ty()?);
                self.expect_punct(Punct::Gt)?;
                Ok(match k {
                    Keyword::Seq => TypeExpr::Seq(inner),
                    Keyword::Set => TypeExpr::Set(inner),
                    _ => TypeExpr::Option(inner),
                })
            }
            Token::Keyword(Keyword::Map) => {
                self.expect_punct(Punct::Lt)?;
                let k = self.ty()?;
                self.expect_punct(Punct::Comma)?;
                let v = self.ty()?;
                self.expect_punct(Punct::Gt)?;
                Ok(TypeExpr::map(k, v))
            }
            Token::Ident(s) => Ok(TypeExpr::Named(Identifier::new(s).unwrap())),
            Token::Punct(Punct::LParen) => {
                let first = self.ty()?;
                if self.eat_punct(Punct::RParen) {
                    return Ok(first);
                }
                self.expect_punct(Punct::Comma)?;
                let mut parts = vec![first];
                parts.extend(self.comma_list(Punct::RParen, |p| p.ty())?);
                Ok(TypeExpr::Tuple(parts))
            }
            t => {
                self.unbump(&t);
                Err(self.error(&["type"]))
            }
        }
    }

    // ---- top level ---------------------------------------------------

    fn toplevel(&mut self) -> PResult<TopLevel> {
        match self.peek() {
            Token::Keyword(Keyword::Struct | Keyword::Variant | Keyword::Subtype) => {
                Ok(TopLevel::Type(self.type_definition()?))
            }
            Token::Keyword(Keyword::Types) => {
                self.bump();
                self.expect_punct(Punct::LBrace)?;
                let mut defs = Vec::new();
                while !self.eat_punct(Punct::RBrace) {
                    defs.push(self.type_definition()?);
                }
                if defs.is_empty() {
                    return Err(self.error(&["type definition"]));
                }
                Ok(TopLevel::TypeClique(defs))
            }
            Token::Keyword(Keyword::Function) => {
                if self.peek_at(2) == &Token::Punct(Punct::Assign) {
                    self.transform()
                } else {
                    Ok(TopLevel::Function(self.function()?))
                }
            }
            Token::Keyword(Keyword::Functions) => {
                self.bump();
                self.expect_punct(Punct::LBrace)?;
                let mut defs = Vec::new();
                while !self.eat_punct(Punct::RBrace) {
                    defs.push(self.function()?);
                }
                if defs.is_empty() {
                    return Err(self.error(&["function definition"]));
                }
                Ok(TopLevel::FunctionClique(defs))
            }
            Token::Keyword(Keyword::Specification) => self.specification(),
            Token::Keyword(Keyword::Theorem) => self.theorem(),
            _ => Err(self.error(&[
                "`struct`",
                "`variant`",
                "`subtype`",
                "`types`",
                "`function`",
                "`functions`",
                "`specification`",
                "`theorem`",
            ])),
        }
    }

    fn type_definition(&mut self) -> PResult<TypeDefinition> {
        let kw = self.bump();
        let name = self.ident()?;
        self.expect_punct(Punct::LBrace)?;
        let body = match kw {
            Token::Keyword(Keyword::Struct) => {
                let mut fields = Vec::new();
                let mut invariant = None;
                loop {
                    if self.eat_punct(Punct::RBrace) {
                        break;
                    }
                    if self.eat_punct(Punct::Bar) {
                        invariant = Some(self.expr()?);
                        self.expect_punct(Punct::RBrace)?;
                        break;
                    }
                    fields.push(self.typed_name()?);
                    if !self.eat_punct(Punct::Comma)
                        && !self.is_punct(Punct::Bar)
                        && !self.is_punct(Punct::RBrace)
                    {
                        return Err(self.error(&["`,`", "`|`", "`}`"]));
                    }
                }
                if fields.is_empty() {
                    return Err(self.error(&["struct field"]));
                }
                TypeBody::Product { fields, invariant }
            }
            Token::Keyword(Keyword::Variant) => {
                let alternatives = self.comma_list(Punct::RBrace, |p| {
                    let name = p.ident()?;
                    let fields = if p.eat_punct(Punct::LParen) {
                        p.comma_list(Punct::RParen, |p| p.typed_name())?
                    } else if p.eat_punct(Punct::LBrace) {
                        p.comma_list(Punct::RBrace, |p| p.typed_name())?
                    } else {
                        Vec::new()
                    };
                    Ok(Alternative { name, fields })
                })?;
                TypeBody::Sum { alternatives }
            }
            Token::Keyword(Keyword::Subtype) => {
                let variable = self.ident()?;
                self.expect_punct(Punct::Colon)?;
                let supertype = self.ty()?;
                self.expect_punct(Punct::Bar)?;
                let restriction = self.expr()?;
                let witness = if self.eat_kw(Keyword::Witness) {
                    Some(self.expr()?)
                } else {
                    None
                };
                self.expect_punct(Punct::RBrace)?;
                TypeBody::Subtype {
                    supertype,
                    variable,
                    restriction,
                    witness,
                }
            }
            t => {
                self.unbump(&t);
                return Err(self.error(&["`struct`", "`variant`", "`subtype`"]));
            }
        };
        Ok(TypeDefinition { name, body })
    }

    fn header_tail(&mut self, name: Identifier) -> PResult<(FunctionHeader, Option<Expression>)> {
        let inputs = self.typed_names()?;
        let precondition = if self.eat_kw(Keyword::Assumes) {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_kw(Keyword::Returns)?;
        let outputs = self.typed_names()?;
        if outputs.is_empty() {
            return Err(self.error(&["at least one output"]));
        }
        Ok((
            FunctionHeader {
                name,
                inputs,
                outputs,
            },
            precondition,
        ))
    }

    fn function(&mut self) -> PResult<FunctionDefinition> {
        self.expect_kw(Keyword::Function)?;
        let name = self.ident()?;
        let (header, precondition) = self.header_tail(name)?;
        let postcondition = if self.eat_kw(Keyword::Ensures) {
            Some(self.expr()?)
        } else {
            None
        };
        self.expect_punct(Punct::LBrace)?;
        let body = if let Some(quantifier) = self.quantifier() {
            let bound = self.typed_names()?;
            let matrix = self.expr()?;
            self.eat_punct(Punct::Semi);
            self.expect_punct(Punct::RBrace)?;
            FunctionBody::Quantified {
                quantifier,
                bound,
                matrix,
            }
        } else {
            FunctionBody::Regular(self.block_rest()?)
        };
        Ok(FunctionDefinition {
            header,
            precondition,
            postcondition,
            body,
        })
    }

    fn quantifier(&mut self) -> Option<Quantifier> {
        if self.eat_kw(Keyword::Forall) {
            Some(Quantifier::Forall)
        } else if self.eat_kw(Keyword::Exists) {
            Some(Quantifier::Exists)
        } else {
            None
        }
    }

    fn transform(&mut self) -> PResult<TopLevel> {
        self.expect_kw(Keyword::Function)?;
        let new_name = self.ident()?;
        self.expect_punct(Punct::Assign)?;
        self.expect_kw(Keyword::Transform)?;
        let target = self.ident()?;
        self.expect_kw(Keyword::By)?;
        let transform = self.ident()?;
        let options = if self.eat_punct(Punct::LBrace) {
            self.comma_list(Punct::RBrace, |p| {
                let name = p.ident()?;
                p.expect_punct(Punct::Assign)?;
                let value = match p.expr()? {
                    Expression::Variable(v) => OptionValue::Identifier(v),
                    Expression::Literal(Literal::Bool(b)) => OptionValue::Bool(b),
                    e => OptionValue::Expression(e),
                };
                Ok((name, value))
            })?
        } else {
            Vec::new()
        };
        Ok(TopLevel::Transform(TransformInvocation {
            new_name,
            target,
            transform,
            options,
        }))
    }

    fn specification(&mut self) -> PResult<TopLevel> {
        self.expect_kw(Keyword::Specification)?;
        let name = self.ident()?;
        self.expect_punct(Punct::LParen)?;
        let headers = self.comma_list(Punct::RParen, |p| {
            p.expect_kw(Keyword::Function)?;
            let name = p.ident()?;
            let (header, pre) = p.header_tail(name)?;
            if pre.is_some() {
                return Err(p.error(&["`returns`"]));
            }
            Ok(header)
        })?;
        self.expect_punct(Punct::LBrace)?;
        let body = if let Some(quantifier) = self.quantifier() {
            let bound = self.typed_names()?;
            let matrix = self.expr()?;
            SpecBody::Quantified {
                quantifier,
                bound,
                matrix,
            }
        } else {
            let e = self.expr()?;
            if headers.len() == 1 {
                SpecBody::IoRelation(e)
            } else {
                SpecBody::Plain(e)
            }
        };
        self.eat_punct(Punct::Semi);
        self.expect_punct(Punct::RBrace)?;
        Ok(TopLevel::Specification(Specification {
            name,
            headers,
            body,
        }))
    }

    fn theorem(&mut self) -> PResult<TopLevel> {
        self.expect_kw(Keyword::Theorem)?;
        let name = self.ident()?;
        let variables = if self.eat_kw(Keyword::Forall) {
            self.typed_names()?
        } else {
            Vec::new()
        };
        let formula = self.expr()?;
        Ok(TopLevel::Theorem(Theorem {
            name,
            variables,
            formula,
        }))
    }

    // ---- statements --------------------------------------------------

    /// Statements up to and including the closing `}` of a block.
    fn block_rest(&mut self) -> PResult<Expression> {
        if self.eat_kw(Keyword::Let) {
            let locals = self.let_bindings()?;
            self.expect_punct(Punct::Semi)?;
            let body = self.block_rest()?;
            return Ok(Expression::Bind {
                locals,
                body: Box::new(body),
            });
        }
        let e = if self.eat_kw(Keyword::Return) {
            let e = self.expr()?;
            self.expect_punct(Punct::Semi)?;
            e
        } else if self.is_kw(Keyword::If) {
            self.if_statement()?
        } else {
            let e = self.expr()?;
            self.eat_punct(Punct::Semi);
            e
        };
        self.expect_punct(Punct::RBrace)?;
        Ok(e)
    }

    fn let_bindings(&mut self) -> PResult<Vec<LocalBinding>> {
        let mut locals = Vec::new();
        loop {
            let name = self.ident()?;
            self.expect_punct(Punct::Colon)?;
            let ty = self.ty()?;
            self.expect_punct(Punct::Assign)?;
            let value = self.expr()?;
            locals.push(LocalBinding { name, ty, value });
            if !self.eat_punct(Punct::Comma) {
                return Ok(locals);
            }
        }
    }

    fn if_statement(&mut self) -> PResult<Expression> {
        self.expect_kw(Keyword::If)?;
        self.expect_punct(Punct::LParen)?;
        let test = self.expr()?;
        self.expect_punct(Punct::RParen)?;
        self.expect_punct(Punct::LBrace)?;
        let then = self.block_rest()?;
        self.expect_kw(Keyword::Else)?;
        let otherwise = if self.is_kw(Keyword::If) {
            self.if_statement()?
        } else {
            self.expect_punct(Punct::LBrace)?;
            self.block_rest()?
        };
        Ok(Expression::cond(test, then, otherwise))
    }

    // ---- expressions -------------------------------------------------

    fn expr(&mut self) -> PResult<Expression> {
        let test = self.binary(1)?;
        if self.eat_punct(Punct::Question) {
            let then = self.expr()?;
            self.expect_punct(Punct::Colon)?;
            let otherwise = self.expr()?;
            return Ok(Expression::cond(test, then, otherwise));
        }
        Ok(test)
    }

    fn peek_binop(&self) -> Option<BinaryOp> {
        let Token::Punct(p) = self.peek() else {
            return None;
        };
        Some(match p {
            Punct::EqEq => BinaryOp::Eq,
            Punct::Ne => BinaryOp::Ne,
            Punct::Lt => BinaryOp::Lt,
            Punct::Le => BinaryOp::Le,
            Punct::Gt => BinaryOp::Gt,
            Punct::Ge => BinaryOp::Ge,
            Punct::Plus => BinaryOp::Add,
            Punct::Minus => BinaryOp::Sub,
            Punct::Star => BinaryOp::Mul,
            Punct::Slash => BinaryOp::Div,
            Punct::Percent => BinaryOp::Rem,
            Punct::AndAnd => BinaryOp::And,
            Punct::OrOr => BinaryOp::Or,
            Punct::Implies => BinaryOp::Implies,
            Punct::ImpliedBy => BinaryOp::ImpliedBy,
            Punct::Iff => BinaryOp::Iff,
            _ => return None,
        })
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expression> {
        let mut left = self.unary()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump();
            let next = if op.right_assoc() { prec } else { prec + 1 };
            let right = self.binary(next)?;
            left = Expression::binary(op, left, right);
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expression> {
        if self.eat_punct(Punct::Bang) {
            return Ok(Expression::Unary(UnaryOp::Not, Box::new(self.unary()?)));
        }
        if self.eat_punct(Punct::Minus) {
            if let Token::Int(n) = self.peek().clone() {
                self.bump();
                // `-5.f` negates the access, like `-x.f`
                return Ok(match self.postfix(Expression::Literal(Literal::Int(n)))? {
                    Expression::Literal(Literal::Int(n)) => Expression::Literal(Literal::Int(-n)),
                    e => Expression::Unary(UnaryOp::Neg, Box::new(e)),
                });
            }
            return Ok(Expression::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        let e = self.primary()?;
        self.postfix(e)
    }

    fn postfix(&mut self, mut e: Expression) -> PResult<Expression> {
        loop {
            if self.eat_punct(Punct::Dot) {
                match self.bump() {
                    Token::Int(n) => {
                        let i: usize = n.try_into().map_err(|_| self.error(&["tuple index"]))?;
                        e = Expression::TupleAccess(Box::new(e), i);
                    }
                    Token::Ident(s) => {
                        let name = Identifier::new(s).unwrap();
                        if self.eat_punct(Punct::ColonColon) {
                            let field = self.ident()?;
                            e = Expression::SumAccess(Box::new(e), name, field);
                        } else {
                            e = Expression::ProductAccess(Box::new(e), name);
                        }
                    }
                    t => {
                        self.unbump(&t);
                        return Err(self.error(&["field name", "tuple index"]));
                    }
                }
            } else if self.eat_kw(Keyword::Is) {
                let alt = self.ident()?;
                e = Expression::SumTest(Box::new(e), alt);
            } else if self.eat_kw(Keyword::With) {
                self.expect_punct(Punct::LParen)?;
                let fields = self.comma_list(Punct::RParen, |p| p.field_init())?;
                e = Expression::ProductUpdate(Box::new(e), fields);
            } else {
                return Ok(e);
            }
        }
    }

    fn field_init(&mut self) -> PResult<(Identifier, Expression)> {
        let name = self.ident()?;
        self.expect_punct(Punct::Assign)?;
        Ok((name, self.expr()?))
    }

    fn primary(&mut self) -> PResult<Expression> {
        match self.peek().clone() {
            Token::Int(n) => {
                self.bump();
                Ok(Expression::Literal(Literal::Int(n)))
            }
            Token::Char(c) => {
                self.bump();
                Ok(Expression::Literal(Literal::Char(c)))
            }
            Token::Str(s) => {
                self.bump();
                Ok(Expression::Literal(Literal::String(s)))
            }
            Token::Keyword(Keyword::True) => {
                self.bump();
                Ok(Expression::bool(true))
            }
            Token::Keyword(Keyword::False) => {
                self.bump();
                Ok(Expression::bool(false))
            }
            Token::Keyword(Keyword::None) => {
                self.bump();
                Ok(Expression::None)
            }
            Token::Keyword(Keyword::Some) => {
                self.bump();
                self.expect_punct(Punct::LParen)?;
                let e = self.expr()?;
                self.expect_punct(Punct::RParen)?;
                Ok(Expression::Some(Box::new(e)))
            }
            Token::Keyword(Keyword::Empty) => {
                self.bump();
                self.expect_punct(Punct::Lt)?;
                let t = self.ty()?;
                self.expect_punct(Punct::Gt)?;
                Ok(Expression::Empty(t))
            }
            Token::Punct(Punct::LParen) => {
                self.bump();
                let first = self.expr()?;
                if self.eat_punct(Punct::RParen) {
                    return Ok(first);
                }
                self.expect_punct(Punct::Comma)?;
                let mut parts = vec![first];
                parts.extend(self.comma_list(Punct::RParen, |p| p.expr())?);
                Ok(Expression::Tuple(parts))
            }
            Token::Punct(Punct::LBrace) => {
                self.bump();
                self.block_rest()
            }
            Token::Ident(_) => {
                let name = self.ident()?;
                if self.eat_punct(Punct::ColonColon) {
                    let alternative = self.ident()?;
                    self.expect_punct(Punct::LParen)?;
                    let fields = self.comma_list(Punct::RParen, |p| p.field_init())?;
                    return Ok(Expression::SumConstruct {
                        ty: name,
                        alternative,
                        fields,
                    });
                }
                if !self.eat_punct(Punct::LParen) {
                    return Ok(Expression::Variable(name));
                }
                let named = matches!(self.peek(), Token::Ident(_))
                    && self.peek_at(1) == &Token::Punct(Punct::Assign);
                if named {
                    let fields = self.comma_list(Punct::RParen, |p| p.field_init())?;
                    Ok(Expression::ProductConstruct { ty: name, fields })
                } else {
                    let args = self.comma_list(Punct::RParen, |p| p.expr())?;
                    Ok(Expression::Call(name, args))
                }
            }
            _ => Err(self.error(&["expression"])),
        }
    }
}

/// Integer literal helper used by tests and builders.
pub fn int_lit(n: impl Into<BigInt>) -> Expression {
    Expression::Literal(Literal::Int(n.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(src: &str) -> Expression {
        parse_expression(src).unwrap()
    }

    #[test]
    fn struct_point() {
        let units = parse_program("struct point { x: int, y: int }").unwrap();
        assert_eq!(
            units,
            vec![TopLevel::Type(TypeDefinition {
                name: "point".into(),
                body: TypeBody::Product {
                    fields: vec![
                        TypedName::new("x", TypeExpr::Int),
                        TypedName::new("y", TypeExpr::Int)
                    ],
                    invariant: None
                }
            })]
        );
    }

    #[test]
    fn empty_program() {
        assert_eq!(parse_program("").unwrap(), vec![]);
        assert_eq!(parse_program("  /* nothing */ ").unwrap(), vec![]);
    }

    #[test]
    fn factorial() {
        let src = "function factorial (n:int) assumes n >= 0 returns (out:int) ensures out > 0 {
  if (n == 0) {
    return 1;
  }
  else {
    return n * factorial(n - 1);
  }
}";
        let units = parse_program(src).unwrap();
        let TopLevel::Function(f) = &units[0] else {
            panic!()
        };
        assert_eq!(f.header.name.as_str(), "factorial");
        assert_eq!(f.precondition, Some(e("n >= 0")));
        assert_eq!(f.postcondition, Some(e("out > 0")));
        assert_eq!(
            f.body,
            FunctionBody::Regular(e("n == 0 ? 1 : n * factorial(n - 1)"))
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(e("a || b && c"), e("a || (b && c)"));
        assert_eq!(e("a ==> b ==> c"), e("a ==> (b ==> c)"));
        assert_eq!(e("a <==> b ==> c"), e("a <==> (b ==> c)"));
        assert_eq!(e("a - b - c"), e("(a - b) - c"));
        assert_eq!(e("!a && b"), e("(!a) && b"));
        assert_eq!(e("c ? a : b ? x : y"), e("c ? a : (b ? x : y)"));
        assert_eq!(e("1 + 2 * 3 == 7"), e("(1 + (2 * 3)) == 7"));
        assert_eq!(e("-x.f"), e("-(x.f)"));
        assert_eq!(e("-5.f"), e("-(5.f)"));
    }

    #[test]
    fn negative_literal_folds() {
        assert_eq!(e("-5"), int_lit(-5));
        assert_eq!(
            e("-(5)"),
            Expression::Unary(UnaryOp::Neg, Box::new(int_lit(5)))
        );
    }

    #[test]
    fn constructions_and_accesses() {
        assert!(matches!(
            e("point(x = 1, y = 2)"),
            Expression::ProductConstruct { .. }
        ));
        assert!(matches!(e("f(x, y)"), Expression::Call(..)));
        assert!(matches!(e("tree::leaf()"), Expression::SumConstruct { .. }));
        assert!(matches!(e("t is node"), Expression::SumTest(..)));
        assert!(matches!(e("t.node::l"), Expression::SumAccess(..)));
        assert!(matches!(e("p with (x = 3)"), Expression::ProductUpdate(..)));
        assert!(matches!(e("(1, true).1"), Expression::TupleAccess(_, 1)));
        assert!(matches!(e("empty<seq<int>>"), Expression::Empty(_)));
    }

    #[test]
    fn error_has_position_and_expectation() {
        let err = parse_program("struct p {\n  x: int,\n  y: }").unwrap_err();
        assert_eq!((err.line, err.column), (3, 6));
        assert_eq!(err.expected, vec!["type".to_string()]);
    }

    #[test]
    fn transform_and_theorem() {
        let src = "theorem path_p_rest
  forall(edges:seq<edge>)
    !is_empty(edges) && path_p(edges)
      ==> path_p(rest(edges))
function crossings_count_aux_1 =
  transform crossings_count_aux
    by tail_recursion {new_parameter_name = count}
function point_in_polygon_final =
  transform point_in_polygon
    by simplify";
        let units = parse_program(src).unwrap();
        assert_eq!(units.len(), 3);
        let TopLevel::Transform(t) = &units[1] else {
            panic!()
        };
        assert_eq!(
            t.option("new_parameter_name"),
            Some(&OptionValue::Identifier("count".into()))
        );
    }
}
