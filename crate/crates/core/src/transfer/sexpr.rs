//! The restricted S-expression dialect exchanged over the bridge.

use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

/// Home package of the bare special symbols.
pub const DEFAULT_PACKAGE: &str = "ACL2";
pub const SPECIAL_SYMBOLS: [&str; 4] = ["T", "NIL", "LIST", "CODE-CHAR"];

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SExpr {
    List(Vec<SExpr>),
    Symbol {
        package: String,
        name: String,
    },
    Keyword(String),
    String(String),
    Int(BigInt),
    /// ISO 8859-1 code; written `(CODE-CHAR n)`.
    Char(u8),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SExprError {
    #[error("offset {offset}: {message}")]
    Lex { offset: usize, message: String },
    #[error("offset {offset}: unbalanced parentheses")]
    Unbalanced { offset: usize },
    #[error("offset {offset}: {what} is not supported")]
    Forbidden { offset: usize, what: String },
    #[error("offset {offset}: unexpected input after the form")]
    Trailing { offset: usize },
    #[error("symbol name {0:?} has characters outside A-Z 0-9 . - [ ]")]
    BadSymbol(String),
}

impl SExpr {
    pub fn sym(package: &str, name: &str) -> SExpr {
        SExpr::Symbol {
            package: package.to_string(),
            name: name.to_string(),
        }
    }

    /// A bare special symbol (`T`, `NIL`, `LIST`, `CODE-CHAR`).
    pub fn special(name: &str) -> SExpr {
        debug_assert!(SPECIAL_SYMBOLS.contains(&name));
        SExpr::sym(DEFAULT_PACKAGE, name)
    }

    pub fn nil() -> SExpr {
        SExpr::special("NIL")
    }

    pub fn t() -> SExpr {
        SExpr::special("T")
    }

    pub fn bool(b: bool) -> SExpr {
        if b {
            SExpr::t()
        } else {
            SExpr::nil()
        }
    }

    pub fn is_nil(&self) -> bool {
        self.is_symbol(DEFAULT_PACKAGE, "NIL")
    }

    pub fn is_symbol(&self, package: &str, name: &str) -> bool {
        matches!(self, SExpr::Symbol { package: p, name: n } if p == package && n == name)
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items) => Some(items),
            _ => None,
        }
    }
}

pub fn valid_symbol_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit() || b"-.[]".contains(&b))
        && !is_integer_text(name)
}

fn is_integer_text(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Canonical single-line text.
pub fn serialize(s: &SExpr) -> Result<String, SExprError> {
    let mut out = String::new();
    write_sexpr(&mut out, s)?;
    Ok(out)
}

fn write_sexpr(out: &mut String, s: &SExpr) -> Result<(), SExprError> {
    match s {
        SExpr::List(items) => {
            out.push('(');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                write_sexpr(out, item)?;
            }
            out.push(')');
        }
        SExpr::Symbol { package, name } => {
            if !valid_symbol_name(name) {
                return Err(SExprError::BadSymbol(name.clone()));
            }
            if package == DEFAULT_PACKAGE && SPECIAL_SYMBOLS.contains(&name.as_str()) {
                out.push_str(name);
            } else {
                if !valid_symbol_name(package) {
                    return Err(SExprError::BadSymbol(package.clone()));
                }
                out.push_str(package);
                out.push_str("::");
                out.push_str(name);
            }
        }
        SExpr::Keyword(name) => {
            if !valid_symbol_name(name) {
                return Err(SExprError::BadSymbol(name.clone()));
            }
            out.push(':');
            out.push_str(name);
        }
        SExpr::String(text) => {
            out.push('"');
            for c in text.chars() {
                if c == '"' || c == '\\' {
                    out.push('\\');
                }
                out.push(c);
            }
            out.push('"');
        }
        SExpr::Int(n) => out.push_str(&n.to_string()),
        SExpr::Char(c) => {
            out.push_str("(CODE-CHAR ");
            out.push_str(&c.to_string());
            out.push(')');
        }
    }
    Ok(())
}

impl fmt::Display for SExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match serialize(self) {
            Ok(s) => f.write_str(&s),
            Err(_) => Err(fmt::Error),
        }
    }
}

/// Collapses runs of whitespace outside string literals to single spaces
/// and removes spaces next to parentheses.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::new();
    let mut in_string = false;
    let mut escaped = false;
    let mut pending_space = false;
    for c in text.chars() {
        if in_string {
            out.push(c);
            if escaped {
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                in_string = false;
            }
            continue;
        }
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && c != ')' && !out.is_empty() && !out.ends_with('(') {
            out.push(' ');
        }
        pending_space = false;
        if c == '"' {
            in_string = true;
        }
        out.push(c);
    }
    out
}

#[derive(Debug, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(SExpr),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, SExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                out.push((Tok::Open, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::Close, i));
                i += 1;
            }
            b'`' | b'\'' | b',' | b'#' | b'|' | b'\\' | b';' | b'@' => {
                let what = match c {
                    b'`' => "backquote",
                    b'\'' => "quote",
                    b',' => "comma",
                    b'#' => "reader macro",
                    b'|' | b'\\' => "symbol escape",
                    b';' => "comment",
                    _ => "splice",
                };
                return Err(SExprError::Forbidden {
                    offset: i,
                    what: what.into(),
                });
            }
            b'"' => {
                let start = i;
                i += 1;
                let mut s = String::new();
                loop {
                    let Some(ch) = text[i..].chars().next() else {
                        return Err(SExprError::Lex {
                            offset: start,
                            message: "unterminated string".into(),
                        });
                    };
                    i += ch.len_utf8();
                    match ch {
                        '"' => break,
                        '\\' => {
                            let Some(esc) = text[i..].chars().next() else {
                                return Err(SExprError::Lex {
                                    offset: start,
                                    message: "unterminated string".into(),
                                });
                            };
                            i += esc.len_utf8();
                            s.push(esc);
                        }
                        ch => s.push(ch),
                    }
                }
                out.push((Tok::Atom(SExpr::String(s)), start));
            }
            _ => {
                let start = i;
                while i < bytes.len() && !b" \t\n\r()\"".contains(&bytes[i]) {
                    i += 1;
                }
                out.push((Tok::Atom(atom(&text[start..i], start)?), start));
            }
        }
    }
    Ok(out)
}

fn atom(word: &str, offset: usize) -> Result<SExpr, SExprError> {
    let bad = |message: String| SExprError::Lex { offset, message };
    if is_integer_text(word) {
        return Ok(SExpr::Int(word.parse().expect("integer text")));
    }
    if let Some(name) = word.strip_prefix(':') {
        if !valid_symbol_name(name) {
            return Err(bad(format!("invalid keyword {word:?}")));
        }
        return Ok(SExpr::Keyword(name.to_string()));
    }
    let (package, name) = match word.split_once("::") {
        Some((p, n)) => (p, n),
        None => (DEFAULT_PACKAGE, word),
    };
    if !valid_symbol_name(package) || !valid_symbol_name(name) {
        return Err(bad(format!("invalid symbol {word:?}")));
    }
    Ok(SExpr::sym(package, name))
}

/// Parses exactly one form.
pub fn parse_sexpr(text: &str) -> Result<SExpr, SExprError> {
    let toks = tokenize(text)?;
    let mut pos = 0;
    let form = parse_form(&toks, &mut pos, text.len())?;
    if let Some((_, offset)) = toks.get(pos) {
        return Err(SExprError::Trailing { offset: *offset });
    }
    Ok(form)
}

/// Parses a sequence of forms.
pub fn parse_sexprs(text: &str) -> Result<Vec<SExpr>, SExprError> {
    let toks = tokenize(text)?;
    let mut pos = 0;
    let mut out = Vec::new();
    while pos < toks.len() {
        out.push(parse_form(&toks, &mut pos, text.len())?);
    }
    Ok(out)
}

fn parse_form(toks: &[(Tok, usize)], pos: &mut usize, end: usize) -> Result<SExpr, SExprError> {
    let Some((tok, offset)) = toks.get(*pos) else {
        return Err(SExprError::Unbalanced { offset: end });
    };
    *pos += 1;
    match tok {
        Tok::Atom(a) => Ok(a.clone()),
        Tok::Close => Err(SExprError::Unbalanced { offset: *offset }),
        Tok::Open => {
            let mut items = Vec::new();
            loop {
                match toks.get(*pos) {
                    None => return Err(SExprError::Unbalanced { offset: *offset }),
                    Some((Tok::Close, _)) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => items.push(parse_form(toks, pos, end)?),
                }
            }
            if let [head, SExpr::Int(n)] = items.as_slice() {
                if head.is_symbol(DEFAULT_PACKAGE, "CODE-CHAR") {
                    if let Ok(c) = u8::try_from(n) {
                        return Ok(SExpr::Char(c));
                    }
                }
            }
            Ok(SExpr::List(items))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_char() {
        assert_eq!(serialize(&SExpr::Char(b'!')).unwrap(), "(CODE-CHAR 33)");
        assert_eq!(parse_sexpr("(CODE-CHAR 33)").unwrap(), SExpr::Char(33));
    }

    #[test]
    fn special_symbols_are_bare() {
        assert_eq!(serialize(&SExpr::t()).unwrap(), "T");
        assert_eq!(serialize(&SExpr::nil()).unwrap(), "NIL");
        assert_eq!(
            serialize(&SExpr::sym("SYNTHETO", "MAKE-X")).unwrap(),
            "SYNTHETO::MAKE-X"
        );
        assert_eq!(serialize(&SExpr::Keyword("GET".into())).unwrap(), ":GET");
    }

    #[test]
    fn simple_list() {
        assert_eq!(
            parse_sexpr("(A B 3)").unwrap(),
            SExpr::List(vec![
                SExpr::sym(DEFAULT_PACKAGE, "A"),
                SExpr::sym(DEFAULT_PACKAGE, "B"),
                SExpr::Int(3.into())
            ])
        );
    }

    #[test]
    fn rejects_reader_syntax() {
        assert!(matches!(
            parse_sexpr("`(A)"),
            Err(SExprError::Forbidden { .. })
        ));
        assert!(matches!(
            parse_sexpr("'A"),
            Err(SExprError::Forbidden { .. })
        ));
        assert!(matches!(
            parse_sexpr("#\\a"),
            Err(SExprError::Forbidden { .. })
        ));
        assert!(matches!(
            parse_sexpr("|a b|"),
            Err(SExprError::Forbidden { .. })
        ));
        assert!(matches!(
            parse_sexpr("(A"),
            Err(SExprError::Unbalanced { .. })
        ));
        assert!(matches!(
            parse_sexpr("A)"),
            Err(SExprError::Trailing { .. })
        ));
        assert!(parse_sexpr("abc").is_err());
    }

    #[test]
    fn strings_escape_quote_and_backslash() {
        let s = SExpr::String("a\"b\\c".into());
        let text = serialize(&s).unwrap();
        assert_eq!(text, "\"a\\\"b\\\\c\"");
        assert_eq!(parse_sexpr(&text).unwrap(), s);
    }

    #[test]
    fn whitespace_normalization() {
        assert_eq!(
            normalize_whitespace("(A\n   (B  \"x  y\" )\n )"),
            "(A (B \"x  y\"))"
        );
    }
}
