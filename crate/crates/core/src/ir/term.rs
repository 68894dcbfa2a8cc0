//! Core terms and definitions.

use std::fmt;

use crate::eval::Value;
use crate::syntax::TypeExpr;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoreBinding {
    pub name: String,
    /// Declared type of the surface binding, kept for back-translation.
    pub ty: Option<TypeExpr>,
    pub value: CoreTerm,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoreTerm {
    Const(Value),
    Var(String),
    App(String, Vec<CoreTerm>),
    If(Box<CoreTerm>, Box<CoreTerm>, Box<CoreTerm>),
    /// Parallel binding.
    Let(Vec<CoreBinding>, Box<CoreTerm>),
    /// True in the logic; checked at run time.
    Assume(Box<CoreTerm>),
    Quant {
        forall: bool,
        vars: Vec<(String, TypeExpr)>,
        body: Box<CoreTerm>,
    },
    /// Body of a natively implemented type-support definition.
    Primitive,
}

impl CoreTerm {
    pub fn t() -> CoreTerm {
        CoreTerm::Const(Value::Bool(true))
    }

    pub fn nil() -> CoreTerm {
        CoreTerm::Const(Value::Bool(false))
    }

    pub fn int(n: i64) -> CoreTerm {
        CoreTerm::Const(Value::int(n))
    }

    pub fn var(name: &str) -> CoreTerm {
        CoreTerm::Var(name.to_string())
    }

    pub fn app(f: &str, args: Vec<CoreTerm>) -> CoreTerm {
        CoreTerm::App(f.to_string(), args)
    }

    pub fn ite(c: CoreTerm, a: CoreTerm, b: CoreTerm) -> CoreTerm {
        CoreTerm::If(Box::new(c), Box::new(a), Box::new(b))
    }

    pub fn not(a: CoreTerm) -> CoreTerm {
        CoreTerm::app("not", vec![a])
    }

    /// N-ary conjunction; `t` when empty, the sole conjunct when single.
    pub fn and(mut parts: Vec<CoreTerm>) -> CoreTerm {
        match parts.len() {
            0 => CoreTerm::t(),
            1 => parts.remove(0),
            _ => CoreTerm::App("and".into(), parts),
        }
    }

    pub fn is_true(&self) -> bool {
        matches!(self, CoreTerm::Const(Value::Bool(true)))
    }

    pub fn is_false(&self) -> bool {
        matches!(self, CoreTerm::Const(Value::Bool(false)))
    }

    pub fn as_const(&self) -> Option<&Value> {
        match self {
            CoreTerm::Const(v) => Some(v),
            _ => None,
        }
    }

    /// Conjuncts of a (possibly nested) `and`.
    pub fn conjuncts(&self) -> Vec<&CoreTerm> {
        match self {
            CoreTerm::App(f, args) if f == "and" => {
                args.iter().flat_map(|a| a.conjuncts()).collect()
            }
            t if t.is_true() => vec![],
            t => vec![t],
        }
    }

    pub fn children(&self) -> Vec<&CoreTerm> {
        match self {
            CoreTerm::Const(_) | CoreTerm::Var(_) | CoreTerm::Primitive => vec![],
            CoreTerm::App(_, args) => args.iter().collect(),
            CoreTerm::If(c, a, b) => vec![c, a, b],
            CoreTerm::Let(bs, body) => {
                let mut out: Vec<&CoreTerm> = bs.iter().map(|b| &b.value).collect();
                out.push(body);
                out
            }
            CoreTerm::Assume(a) => vec![a],
            CoreTerm::Quant { body, .. } => vec![body],
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn mentions_var(&self, v: &str) -> bool {
        self.free_vars().iter().any(|x| x == v)
    }

    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        match self {
            CoreTerm::Var(v) => {
                if !bound.contains(v) && !out.contains(v) {
                    out.push(v.clone());
                }
            }
            CoreTerm::Let(bs, body) => {
                for b in bs {
                    b.value.collect_free(bound, out);
                }
                let n = bound.len();
                bound.extend(bs.iter().map(|b| b.name.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            CoreTerm::Quant { vars, body, .. } => {
                let n = bound.len();
                bound.extend(vars.iter().map(|(v, _)| v.clone()));
                body.collect_free(bound, out);
                bound.truncate(n);
            }
            t => {
                for c in t.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    pub fn calls(&self, f: &str) -> bool {
        match self {
            CoreTerm::App(g, _) if g == f => true,
            t => t.children().iter().any(|c| c.calls(f)),
        }
    }

    /// Every call node, outermost first.
    pub fn collect_calls<'a>(&'a self, f: &str, out: &mut Vec<&'a [CoreTerm]>) {
        if let CoreTerm::App(g, args) = self {
            if g == f {
                out.push(args);
            }
        }
        for c in self.children() {
            c.collect_calls(f, out);
        }
    }

    pub fn map_children(&self, mut f: impl FnMut(&CoreTerm) -> CoreTerm) -> CoreTerm {
        match self {
            CoreTerm::Const(_) | CoreTerm::Var(_) | CoreTerm::Primitive => self.clone(),
            CoreTerm::App(g, args) => CoreTerm::App(g.clone(), args.iter().map(&mut f).collect()),
            CoreTerm::If(c, a, b) => {
                let c = f(c);
                let a = f(a);
                CoreTerm::ite(c, a, f(b))
            }
            CoreTerm::Let(bs, body) => {
                let bs = bs
                    .iter()
                    .map(|b| CoreBinding {
                        name: b.name.clone(),
                        ty: b.ty.clone(),
                        value: f(&b.value),
                    })
                    .collect();
                CoreTerm::Let(bs, Box::new(f(body)))
            }
            CoreTerm::Assume(a) => CoreTerm::Assume(Box::new(f(a))),
            CoreTerm::Quant { forall, vars, body } => CoreTerm::Quant {
                forall: *forall,
                vars: vars.clone(),
                body: Box::new(f(body)),
            },
        }
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn substitute(&self, map: &[(String, CoreTerm)]) -> CoreTerm {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            CoreTerm::Var(v) => map
                .iter()
                .find(|(k, _)| k == v)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| self.clone()),
            CoreTerm::Let(bs, body) => {
                let values: Vec<CoreTerm> = bs.iter().map(|b| b.value.substitute(map)).collect();
                let names: Vec<String> = bs.iter().map(|b| b.name.clone()).collect();
                let (names, body) = rebind(&names, body, map);
                let bs = bs
                    .iter()
                    .zip(names)
                    .zip(values)
                    .map(|((b, name), value)| CoreBinding {
                        name,
                        ty: b.ty.clone(),
                        value,
                    })
                    .collect();
                CoreTerm::Let(bs, Box::new(body))
            }
            CoreTerm::Quant { forall, vars, body } => {
                let names: Vec<String> = vars.iter().map(|(v, _)| v.clone()).collect();
                let (names, body) = rebind(&names, body, map);
                CoreTerm::Quant {
                    forall: *forall,
                    vars: names
                        .into_iter()
                        .zip(vars)
                        .map(|(n, (_, t))| (n, t.clone()))
                        .collect(),
                    body: Box::new(body),
                }
            }
            t => t.map_children(|c| c.substitute(map)),
        }
    }
}

/// Substitutes under binders `names`, renaming binders that would capture.
fn rebind(
    names: &[String],
    body: &CoreTerm,
    map: &[(String, CoreTerm)],
) -> (Vec<String>, CoreTerm) {
    let inner: Vec<(String, CoreTerm)> = map
        .iter()
        .filter(|(k, _)| !names.contains(k))
        .cloned()
        .collect();
    let mut captured: Vec<String> = inner.iter().flat_map(|(_, t)| t.free_vars()).collect();
    captured.extend(body.free_vars());
    let mut renames = Vec::new();
    let mut out = Vec::new();
    for n in names {
        if inner.iter().any(|(_, t)| t.mentions_var(n)) {
            let fresh = fresh_var(n, |c| {
                captured.iter().any(|x| x == c) || names.iter().any(|x| x == c)
            });
            captured.push(fresh.clone());
            renames.push((n.clone(), CoreTerm::Var(fresh.clone())));
            out.push(fresh);
        } else {
            out.push(n.clone());
        }
    }
    (out, body.substitute(&renames).substitute(&inner))
}

pub fn fresh_var(base: &str, taken: impl Fn(&str) -> bool) -> String {
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|c| !taken(c))
        .expect("unbounded")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreOrigin {
    User,
    TypeSupport,
    Transform(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreDef {
    pub name: String,
    pub params: Vec<String>,
    pub guard: CoreTerm,
    /// The body proper, below the guard test.
    pub inner: CoreTerm,
    /// Result when the guard is false in the logic.
    pub default: CoreTerm,
    pub measure: Option<CoreTerm>,
    /// Output names with their recognizers.
    pub returns: Vec<(String, String)>,
    pub postcondition: Option<CoreTerm>,
    pub origin: CoreOrigin,
    pub clique: Vec<String>,
}

impl CoreDef {
    /// `(if (assume guard) inner default)`.
    pub fn body(&self) -> CoreTerm {
        CoreTerm::ite(
            CoreTerm::Assume(Box::new(self.guard.clone())),
            self.inner.clone(),
            self.default.clone(),
        )
    }

    pub fn is_recursive(&self) -> bool {
        self.clique.iter().any(|g| self.inner.calls(g))
    }

    pub fn is_primitive(&self) -> bool {
        self.inner == CoreTerm::Primitive
    }
}

fn write_const(f: &mut fmt::Formatter<'_>, v: &Value) -> fmt::Result {
    match v {
        Value::Bool(true) => f.write_str("t"),
        Value::Bool(false) => f.write_str("nil"),
        Value::Int(n) => write!(f, "{n}"),
        Value::Char(c) => write!(f, "(code-char {c})"),
        Value::String(s) => {
            f.write_str("\"")?;
            for c in s.chars() {
                if c == '"' || c == '\\' {
                    f.write_str("\\")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str("\"")
        }
        other => write!(f, "(quote {other})"),
    }
}

impl fmt::Display for CoreTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreTerm::Const(v) => write_const(f, v),
            CoreTerm::Var(v) => f.write_str(v),
            CoreTerm::App(g, args) => {
                write!(f, "({g}")?;
                for a in args {
                    write!(f, " {a}")?;
                }
                f.write_str(")")
            }
            CoreTerm::If(c, a, b) => write!(f, "(if {c} {a} {b})"),
            CoreTerm::Let(bs, body) => {
                f.write_str("(let (")?;
                for (i, b) in bs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "({} {})", b.name, b.value)?;
                }
                write!(f, ") {body})")
            }
            CoreTerm::Assume(a) => write!(f, "(assume {a})"),
            CoreTerm::Quant { forall, vars, body } => {
                f.write_str(if *forall { "(forall (" } else { "(exists (" })?;
                for (i, (v, _)) in vars.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    f.write_str(v)?;
                }
                write!(f, ") {body})")
            }
            CoreTerm::Primitive => f.write_str(":primitive"),
        }
    }
}

impl fmt::Display for CoreDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(define {} ({})", self.name, self.params.join(" "))?;
        if !self.guard.is_true() {
            write!(f, " :guard {}", self.guard)?;
        }
        if let Some(m) = &self.measure {
            write!(f, " :measure {m}")?;
        }
        if !self.returns.is_empty() {
            f.write_str(" :returns (")?;
            for (i, (n, r)) in self.returns.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "({n} {r})")?;
            }
            f.write_str(")")?;
        }
        if let Some(p) = &self.postcondition {
            write!(f, " :ensures {p}")?;
        }
        if self.is_primitive() {
            f.write_str(" :primitive)")
        } else if self.guard.is_true() {
            write!(f, " {})", self.inner)
        } else {
            write!(f, " {})", self.body())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("malformed core term: {0}")]
pub struct CoreParseError(pub String);

fn core_tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
                out.push(c.to_string());
            }
            '"' => {
                cur.push('"');
                while let Some(d) = chars.next() {
                    if d == '\\' {
                        if let Some(e) = chars.next() {
                            cur.push(e);
                        }
                        continue;
                    }
                    if d == '"' {
                        break;
                    }
                    cur.push(d);
                }
                out.push(std::mem::take(&mut cur));
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

struct CoreReader {
    toks: Vec<String>,
    pos: usize,
}

impl CoreReader {
    fn next(&mut self) -> Result<String, CoreParseError> {
        let t = self
            .toks
            .get(self.pos)
            .cloned()
            .ok_or_else(|| CoreParseError("end of input".into()))?;
        self.pos += 1;
        Ok(t)
    }

    fn expect_close(&mut self) -> Result<(), CoreParseError> {
        match self.next()?.as_str() {
            ")" => Ok(()),
            t => Err(CoreParseError(format!("expected `)`, found {t}"))),
        }
    }

    fn term(&mut self) -> Result<CoreTerm, CoreParseError> {
        let t = self.next()?;
        if t == ")" {
            return Err(CoreParseError("unexpected `)`".into()));
        }
        if t != "(" {
            return Ok(atom(&t));
        }
        let head = self.next()?;
        let out = match head.as_str() {
            "if" => {
                let c = self.term()?;
                let a = self.term()?;
                CoreTerm::ite(c, a, self.term()?)
            }
            "assume" => CoreTerm::Assume(Box::new(self.term()?)),
            "code-char" => {
                let n = self.next()?;
                let c = n.parse::<u8>().map_err(|_| CoreParseError(n))?;
                CoreTerm::Const(Value::Char(c))
            }
            "let" => {
                if self.next()? != "(" {
                    return Err(CoreParseError("let bindings".into()));
                }
                let mut bs = Vec::new();
                loop {
                    match self.next()?.as_str() {
                        ")" => break,
                        "(" => {
                            let name = self.next()?;
                            let value = self.term()?;
                            self.expect_close()?;
                            bs.push(CoreBinding {
                                name,
                                ty: None,
                                value,
                            });
                        }
                        t => return Err(CoreParseError(format!("binding {t}"))),
                    }
                }
                let body = self.term()?;
                CoreTerm::Let(bs, Box::new(body))
            }
            "(" | ")" => return Err(CoreParseError("application head".into())),
            _ => {
                let mut args = Vec::new();
                while self.toks.get(self.pos).map(String::as_str) != Some(")") {
                    args.push(self.term()?);
                }
                self.pos += 1;
                return Ok(CoreTerm::App(head, args));
            }
        };
        self.expect_close()?;
        Ok(out)
    }
}

fn atom(t: &str) -> CoreTerm {
    if let Some(s) = t.strip_prefix('"') {
        return CoreTerm::Const(Value::String(s.to_string()));
    }
    match t {
        "t" => CoreTerm::t(),
        "nil" => CoreTerm::nil(),
        _ => match t.parse::<num_bigint::BigInt>() {
            Ok(n) => CoreTerm::Const(Value::Int(n)),
            Err(_) => CoreTerm::Var(t.to_string()),
        },
    }
}

impl std::str::FromStr for CoreTerm {
    type Err = CoreParseError;

    /// Reads the printed form of scalar constants, variables,
    /// applications, `if`, `let` and `assume`.
    fn from_str(s: &str) -> Result<CoreTerm, CoreParseError> {
        let mut r = CoreReader {
            toks: core_tokens(s),
            pos: 0,
        };
        let t = r.term()?;
        if r.pos != r.toks.len() {
            return Err(CoreParseError("trailing input".into()));
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn substitution_avoids_capture() {
        let t = CoreTerm::Let(
            vec![CoreBinding {
                name: "y".into(),
                ty: None,
                value: CoreTerm::int(1),
            }],
            Box::new(CoreTerm::app(
                "+",
                vec![CoreTerm::var("x"), CoreTerm::var("y")],
            )),
        );
        let s = t.substitute(&[("x".into(), CoreTerm::var("y"))]);
        assert_eq!(s.to_string(), "(let ((y_1 1)) (+ y y_1))");
    }

    #[test]
    fn conjuncts_flatten() {
        let t = CoreTerm::and(vec![
            CoreTerm::and(vec![CoreTerm::var("a"), CoreTerm::var("b")]),
            CoreTerm::var("c"),
        ]);
        assert_eq!(t.conjuncts().len(), 3);
    }
}
