//! Core names for types, type-support functions and builtins.
//!
//! Surface identifiers never contain `-`, `>`, `[` or `]`, so every
//! generated name below is distinct from every user name.

use crate::syntax::{Identifier, TypeExpr};

/// Core operators and the surface builtins they come from, if any.
pub const BUILTINS: &[(&str, Option<&str>)] = &[
    ("+", None),
    ("-", None),
    ("*", None),
    ("div", None),
    ("rem", None),
    ("<", None),
    ("<=", None),
    (">", None),
    (">=", None),
    ("equal", None),
    ("/=", None),
    ("and", None),
    ("or", None),
    ("implies", None),
    ("implied", None),
    ("iff", None),
    ("not", None),
    ("unary--", None),
    ("mv", None),
    ("mv-nth", None),
    ("some", None),
    ("none", None),
    ("len", Some("length")),
    ("car", Some("first")),
    ("cdr", Some("rest")),
    ("endp", Some("is_empty")),
    ("member", Some("member")),
    ("add", Some("add")),
    ("remove", Some("remove")),
    ("get", Some("get")),
    ("put", Some("put")),
    ("keys", Some("keys")),
    ("abs", Some("abs")),
    ("gcd", Some("gcd")),
    ("max", Some("max")),
    ("min", Some("min")),
    ("prepend", Some("prepend")),
    ("append", Some("append")),
    ("concat", Some("concat")),
];

/// Core name of a surface builtin.
pub fn builtin_core_name(surface: &str) -> Option<&'static str> {
    BUILTINS
        .iter()
        .find(|(_, s)| *s == Some(surface))
        .map(|(c, _)| *c)
}

/// Surface name of a core builtin.
pub fn builtin_surface_name(core: &str) -> Option<&'static str> {
    BUILTINS
        .iter()
        .find(|(c, _)| *c == core)
        .and_then(|(_, s)| *s)
}

pub fn is_core_builtin(name: &str) -> bool {
    BUILTINS.iter().any(|(c, _)| *c == name)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreName {
    Builtin(String),
    User(Identifier),
    Recognizer(TypeExpr),
    Constructor(Identifier),
    SumConstructor(Identifier, Identifier),
    Accessor(Identifier, Identifier),
    Updater(Identifier, Identifier),
    SumTest(Identifier, Identifier),
    SumAccessor(Identifier, Identifier, Identifier),
    Empty(TypeExpr),
}

/// `int`, `point`, `sequence[int]`, `map[int,sequence[bool]]`, ...
pub fn type_base_name(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Bool => "bool".into(),
        TypeExpr::Char => "char".into(),
        TypeExpr::String => "string".into(),
        TypeExpr::Int => "int".into(),
        TypeExpr::Named(n) => n.to_string(),
        TypeExpr::Option(b) => format!("option[{}]", type_base_name(b)),
        TypeExpr::Set(b) => format!("set[{}]", type_base_name(b)),
        TypeExpr::Seq(b) => format!("sequence[{}]", type_base_name(b)),
        TypeExpr::Map(d, r) => format!("map[{},{}]", type_base_name(d), type_base_name(r)),
        TypeExpr::Tuple(ts) => format!(
            "tuple[{}]",
            ts.iter().map(type_base_name).collect::<Vec<_>>().join(",")
        ),
    }
}

pub fn recognizer_name(t: &TypeExpr) -> String {
    match t {
        TypeExpr::Bool => "boolean-p".into(),
        TypeExpr::Char => "character-p".into(),
        TypeExpr::String => "string-p".into(),
        TypeExpr::Int => "integer-p".into(),
        t => format!("{}-p", type_base_name(t)),
    }
}

fn parse_base(s: &str) -> Option<TypeExpr> {
    let (head, args) = match s.find('[') {
        Some(i) if s.ends_with(']') => (&s[..i], Some(split_args(&s[i + 1..s.len() - 1])?)),
        Some(_) => return None,
        None => (s, None),
    };
    Some(match (head, args) {
        ("bool", None) => TypeExpr::Bool,
        ("char", None) => TypeExpr::Char,
        ("string", None) => TypeExpr::String,
        ("int", None) => TypeExpr::Int,
        (n, None) => TypeExpr::Named(Identifier::new(n)?),
        ("option", Some(a)) if a.len() == 1 => TypeExpr::Option(Box::new(parse_base(a[0])?)),
        ("set", Some(a)) if a.len() == 1 => TypeExpr::Set(Box::new(parse_base(a[0])?)),
        ("sequence", Some(a)) if a.len() == 1 => TypeExpr::Seq(Box::new(parse_base(a[0])?)),
        ("map", Some(a)) if a.len() == 2 => {
            TypeExpr::Map(Box::new(parse_base(a[0])?), Box::new(parse_base(a[1])?))
        }
        ("tuple", Some(a)) => {
            TypeExpr::Tuple(a.into_iter().map(parse_base).collect::<Option<_>>()?)
        }
        _ => return None,
    })
}

/// Splits at top-level commas.
fn split_args(s: &str) -> Option<Vec<&str>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
        if depth < 0 {
            return None;
        }
    }
    out.push(&s[start..]);
    Some(out)
}

fn ident(s: &str) -> Option<Identifier> {
    Identifier::new(s)
}

impl CoreName {
    pub fn mangle(&self) -> String {
        match self {
            CoreName::Builtin(b) => b.clone(),
            CoreName::User(n) => n.to_string(),
            CoreName::Recognizer(t) => recognizer_name(t),
            CoreName::Constructor(t) => format!("make-{t}"),
            CoreName::SumConstructor(t, a) => format!("make-{t}-{a}"),
            CoreName::Accessor(t, f) => format!("{t}->{f}"),
            CoreName::Updater(t, f) => format!("update-{t}->{f}"),
            CoreName::SumTest(t, a) => format!("{t}-{a}-p"),
            CoreName::SumAccessor(t, a, f) => format!("{t}-{a}->{f}"),
            CoreName::Empty(t) => format!("empty-{}", type_base_name(t)),
        }
    }

    pub fn demangle(name: &str) -> Option<CoreName> {
        if is_core_builtin(name) {
            return Some(CoreName::Builtin(name.to_string()));
        }
        if let Some(t) = name.strip_prefix("empty-") {
            return parse_base(t).map(CoreName::Empty);
        }
        if let Some(rest) = name.strip_prefix("update-") {
            let (t, f) = rest.split_once("->")?;
            return Some(CoreName::Updater(ident(t)?, ident(f)?));
        }
        if let Some(rest) = name.strip_prefix("make-") {
            return match rest.split_once('-') {
                None => Some(CoreName::Constructor(ident(rest)?)),
                Some((t, a)) => Some(CoreName::SumConstructor(ident(t)?, ident(a)?)),
            };
        }
        if let Some((lhs, f)) = name.split_once("->") {
            return match lhs.split_once('-') {
                None => Some(CoreName::Accessor(ident(lhs)?, ident(f)?)),
                Some((t, a)) => Some(CoreName::SumAccessor(ident(t)?, ident(a)?, ident(f)?)),
            };
        }
        if let Some(base) = name.strip_suffix("-p") {
            let scalar = match base {
                "integer" => Some(TypeExpr::Int),
                "boolean" => Some(TypeExpr::Bool),
                "character" => Some(TypeExpr::Char),
                "string" => Some(TypeExpr::String),
                _ => None,
            };
            if let Some(t) = scalar {
                return Some(CoreName::Recognizer(t));
            }
            if base.contains('[') {
                return parse_base(base).map(CoreName::Recognizer);
            }
            return match base.split_once('-') {
                None => Some(CoreName::Recognizer(TypeExpr::Named(ident(base)?))),
                Some((t, a)) => Some(CoreName::SumTest(ident(t)?, ident(a)?)),
            };
        }
        ident(name).map(CoreName::User)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_type;

    #[test]
    fn recognizer_names() {
        assert_eq!(recognizer_name(&TypeExpr::Int), "integer-p");
        assert_eq!(
            recognizer_name(&parse_type("seq<point>").unwrap()),
            "sequence[point]-p"
        );
        assert_eq!(
            recognizer_name(&parse_type("map<int, seq<bool>>").unwrap()),
            "map[int,sequence[bool]]-p"
        );
    }

    #[test]
    fn demangle_inverts_mangle() {
        let names = vec![
            CoreName::Builtin("len".into()),
            CoreName::User("crossings_count".into()),
            CoreName::Recognizer(parse_type("seq<set<int>>").unwrap()),
            CoreName::Recognizer(TypeExpr::Int),
            CoreName::Recognizer(TypeExpr::named("point")),
            CoreName::Constructor("point".into()),
            CoreName::SumConstructor("tree".into(), "node".into()),
            CoreName::Accessor("edge".into(), "p1".into()),
            CoreName::Updater("edge".into(), "p1".into()),
            CoreName::SumTest("tree".into(), "leaf".into()),
            CoreName::SumAccessor("tree".into(), "node".into(), "l".into()),
            CoreName::Empty(parse_type("map<int, (int, bool)>").unwrap()),
        ];
        for n in names {
            assert_eq!(
                CoreName::demangle(&n.mangle()),
                Some(n.clone()),
                "{}",
                n.mangle()
            );
        }
    }
}
