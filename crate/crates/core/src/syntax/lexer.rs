//! Tokenizer for `.synth` sources.

use std::fmt;

use num_bigint::BigInt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Token {
    Ident(String),
    Keyword(Keyword),
    Int(BigInt),
    Char(u8),
    Str(String),
    Punct(Punct),
    Eof,
}

macro_rules! keywords {
    ($($variant:ident => $text:literal,)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum Keyword { $($variant,)* }

        impl Keyword {
            pub fn lookup(s: &str) -> Option<Keyword> {
                match s { $($text => Some(Keyword::$variant),)* _ => None }
            }
            pub fn as_str(self) -> &'static str {
                match self { $(Keyword::$variant => $text,)* }
            }
        }
    };
}

keywords! {
    Struct => "struct",
    Variant => "variant",
    Subtype => "subtype",
    Function => "function",
    Returns => "returns",
    Assumes => "assumes",
    Ensures => "ensures",
    Let => "let",
    Return => "return",
    If => "if",
    Else => "else",
    True => "true",
    False => "false",
    Specification => "specification",
    Theorem => "theorem",
    Forall => "forall",
    Exists => "exists",
    Transform => "transform",
    By => "by",
    Types => "types",
    Functions => "functions",
    Some => "some",
    None => "none",
    Empty => "empty",
    Witness => "witness",
    Is => "is",
    With => "with",
    Int => "int",
    Bool => "bool",
    Char => "char",
    String => "string",
    Seq => "seq",
    Set => "set",
    Map => "map",
    Opt => "opt",
}

macro_rules! puncts {
    ($($variant:ident => $text:literal,)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
        pub enum Punct { $($variant,)* }

        impl Punct {
            pub fn as_str(self) -> &'static str {
                match self { $(Punct::$variant => $text,)* }
            }
        }

        /// Longest first, so that maximal munch is a linear scan.
        const PUNCTS: &[(&str, Punct)] = &[$(($text, Punct::$variant),)*];
    };
}

puncts! {
    Iff => "<==>",
    Implies => "==>",
    ImpliedBy => "<==",
    EqEq => "==",
    Ne => "!=",
    Le => "<=",
    Ge => ">=",
    AndAnd => "&&",
    OrOr => "||",
    ColonColon => "::",
    LParen => "(",
    RParen => ")",
    LBrace => "{",
    RBrace => "}",
    Lt => "<",
    Gt => ">",
    Assign => "=",
    Comma => ",",
    Colon => ":",
    Semi => ";",
    Dot => ".",
    Question => "?",
    Bang => "!",
    Plus => "+",
    Minus => "-",
    Star => "*",
    Slash => "/",
    Percent => "%",
    Bar => "|",
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Keyword(k) => write!(f, "`{}`", k.as_str()),
            Token::Int(n) => write!(f, "integer `{n}`"),
            Token::Char(c) => write!(f, "character literal `{}`", char::from(*c)),
            Token::Str(s) => write!(f, "string literal {s:?}"),
            Token::Punct(p) => write!(f, "`{}`", p.as_str()),
            Token::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned {
    pub token: Token,
    pub start: usize,
    pub end: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexError {
    pub offset: usize,
    pub message: String,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if src[i..].starts_with("/*") {
            match src[i + 2..].find("*/") {
                Some(end) => i += end + 4,
                None => {
                    return Err(LexError {
                        offset: i,
                        message: "unterminated comment".into(),
                    })
                }
            }
            continue;
        }
        let start = i;
        let token = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &src[start..i];
            match Keyword::lookup(word) {
                Some(k) => Token::Keyword(k),
                None => Token::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            Token::Int(src[start..i].parse().expect("digits"))
        } else if c == b'\'' {
            let (ch, next) = lex_char_body(src, i + 1, b'\'')?;
            i = next;
            if bytes.get(i) != Some(&b'\'') {
                return Err(LexError {
                    offset: start,
                    message: "unterminated character literal".into(),
                });
            }
            i += 1;
            Token::Char(ch)
        } else if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                match bytes.get(i) {
                    None => {
                        return Err(LexError {
                            offset: start,
                            message: "unterminated string literal".into(),
                        })
                    }
                    Some(b'"') => {
                        i += 1;
                        break;
                    }
                    Some(_) => {
                        let (ch, next) = lex_char_body(src, i, b'"')?;
                        s.push(char::from(ch));
                        i = next;
                    }
                }
            }
            Token::Str(s)
        } else {
            let rest = &src[i..];
            match PUNCTS.iter().find(|(text, _)| rest.starts_with(text)) {
                Some((text, p)) => {
                    i += text.len();
                    Token::Punct(*p)
                }
                None => {
                    let ch = rest.chars().next().unwrap();
                    return Err(LexError {
                        offset: i,
                        message: format!("unexpected character {ch:?}"),
                    });
                }
            }
        };
        out.push(Spanned {
            token,
            start,
            end: i,
        });
    }
    out.push(Spanned {
        token: Token::Eof,
        start: src.len(),
        end: src.len(),
    });
    Ok(out)
}

/// One (possibly escaped) character of a char or string literal.
fn lex_char_body(src: &str, i: usize, quote: u8) -> Result<(u8, usize), LexError> {
    let err = |message: &str| LexError {
        offset: i,
        message: message.to_string(),
    };
    let rest = &src[i..];
    let mut chars = rest.chars();
    let c = chars.next().ok_or_else(|| err("unterminated literal"))?;
    if c == '\\' {
        let e = chars.next().ok_or_else(|| err("unterminated escape"))?;
        let simple = match e {
            'n' => Some(b'\n'),
            't' => Some(b'\t'),
            'r' => Some(b'\r'),
            '0' => Some(0),
            '\\' => Some(b'\\'),
            '\'' => Some(b'\''),
            '"' => Some(b'"'),
            _ => None,
        };
        if let Some(b) = simple {
            return Ok((b, i + 2));
        }
        if e == 'x' {
            let hex = rest.get(2..4).ok_or_else(|| err("short \\x escape"))?;
            let b = u8::from_str_radix(hex, 16).map_err(|_| err("bad \\x escape"))?;
            return Ok((b, i + 4));
        }
        return Err(err("unknown escape"));
    }
    if c as u32 == quote as u32 || c == '\n' {
        return Err(err("empty or unterminated literal"));
    }
    if c as u32 > 0xFF {
        return Err(err("character outside ISO 8859-1"));
    }
    Ok((c as u32 as u8, i + c.len_utf8()))
}

/// Escaped text of a character for use inside a literal delimited by `quote`.
pub fn escape_char(c: u8, quote: char) -> String {
    match c {
        b'\n' => "\\n".into(),
        b'\t' => "\\t".into(),
        b'\r' => "\\r".into(),
        0 => "\\0".into(),
        b'\\' => "\\\\".into(),
        c if char::from(c) == quote => format!("\\{quote}"),
        c if c < 0x20 || c == 0x7F => format!("\\x{c:02x}"),
        c => char::from(c).to_string(),
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..offset];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<Token> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|s| s.token)
            .collect()
    }

    #[test]
    fn maximal_munch_on_arrows() {
        assert_eq!(
            kinds("<==> <== <= ==> == ="),
            vec![
                Token::Punct(Punct::Iff),
                Token::Punct(Punct::ImpliedBy),
                Token::Punct(Punct::Le),
                Token::Punct(Punct::Implies),
                Token::Punct(Punct::EqEq),
                Token::Punct(Punct::Assign),
                Token::Eof
            ]
        );
    }

    #[test]
    fn comments_and_literals() {
        let toks = kinds("/* x */ 'a' \"h\\ti\" 42 foo_1 struct");
        assert_eq!(toks[0], Token::Char(b'a'));
        assert_eq!(toks[1], Token::Str("h\ti".into()));
        assert_eq!(toks[2], Token::Int(42.into()));
        assert_eq!(toks[3], Token::Ident("foo_1".into()));
        assert_eq!(toks[4], Token::Keyword(Keyword::Struct));
    }

    #[test]
    fn latin1_only() {
        assert!(tokenize("'é'").is_ok());
        assert!(tokenize("\"λ\"").is_err());
        assert!(tokenize("/* open").is_err());
    }

    #[test]
    fn positions() {
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
        assert_eq!(line_col("", 0), (1, 1));
    }
}
