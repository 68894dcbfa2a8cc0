//! Runtime values.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::syntax::{Expression, Identifier, Literal};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Bool(bool),
    Char(u8),
    Int(BigInt),
    /// Every char is in the ISO 8859-1 range.
    String(String),
    Option(Option<Box<Value>>),
    Set(BTreeSet<Value>),
    Seq(Vec<Value>),
    Map(BTreeMap<Value, Value>),
    Tuple(Vec<Value>),
    /// Fields in declaration order.
    Product {
        ty: Identifier,
        fields: Vec<(Identifier, Value)>,
    },
    Sum {
        ty: Identifier,
        alternative: Identifier,
        fields: Vec<(Identifier, Value)>,
    },
}

impl Value {
    pub fn int(n: i64) -> Value {
        Value::Int(BigInt::from(n))
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match self {
            Value::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&[Value]> {
        match self {
            Value::Seq(s) => Some(s),
            _ => None,
        }
    }

    pub fn field(&self, name: &str) -> Option<&Value> {
        match self {
            Value::Product { fields, .. } | Value::Sum { fields, .. } => fields
                .iter()
                .find(|(n, _)| n.as_str() == name)
                .map(|(_, v)| v),
            _ => None,
        }
    }

    /// A literal expression denoting this value, when one exists.
    pub fn to_literal(&self) -> Option<Expression> {
        Some(match self {
            Value::Bool(b) => Expression::Literal(Literal::Bool(*b)),
            Value::Char(c) => Expression::Literal(Literal::Char(*c)),
            Value::Int(n) => Expression::Literal(Literal::Int(n.clone())),
            Value::String(s) => Expression::Literal(Literal::String(s.clone())),
            Value::Product { ty, fields } => Expression::ProductConstruct {
                ty: ty.clone(),
                fields: fields
                    .iter()
                    .map(|(n, v)| Some((n.clone(), v.to_literal()?)))
                    .collect::<Option<_>>()?,
            },
            Value::Sum {
                ty,
                alternative,
                fields,
            } => Expression::SumConstruct {
                ty: ty.clone(),
                alternative: alternative.clone(),
                fields: fields
                    .iter()
                    .map(|(n, v)| Some((n.clone(), v.to_literal()?)))
                    .collect::<Option<_>>()?,
            },
            Value::Tuple(vs) => {
                Expression::Tuple(vs.iter().map(|v| v.to_literal()).collect::<Option<_>>()?)
            }
            Value::Option(Some(v)) => Expression::Some(Box::new(v.to_literal()?)),
            _ => return None,
        })
    }

    /// Number of nodes, used as a shrinking order for counterexamples.
    pub fn weight(&self) -> usize {
        match self {
            Value::Bool(_) | Value::Char(_) => 1,
            Value::Int(n) => 1 + n.bits() as usize,
            Value::String(s) => 1 + s.len(),
            Value::Option(o) => 1 + o.as_ref().map_or(0, |v| v.weight()),
            Value::Set(s) => 1 + s.iter().map(Value::weight).sum::<usize>(),
            Value::Seq(s) | Value::Tuple(s) => 1 + s.iter().map(Value::weight).sum::<usize>(),
            Value::Map(m) => {
                1 + m
                    .iter()
                    .map(|(k, v)| k.weight() + v.weight())
                    .sum::<usize>()
            }
            Value::Product { fields, .. } | Value::Sum { fields, .. } => {
                1 + fields.iter().map(|(_, v)| v.weight()).sum::<usize>()
            }
        }
    }
}

impl From<bool> for Value {
    fn from(b: bool) -> Self {
        Value::Bool(b)
    }
}

impl From<BigInt> for Value {
    fn from(n: BigInt) -> Self {
        Value::Int(n)
    }
}

fn write_fields(f: &mut fmt::Formatter<'_>, fields: &[(Identifier, Value)]) -> fmt::Result {
    for (i, (n, v)) in fields.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{n} = {v}")?;
    }
    Ok(())
}

fn write_seq<'a>(
    f: &mut fmt::Formatter<'_>,
    open: &str,
    items: impl Iterator<Item = &'a Value>,
    close: &str,
) -> fmt::Result {
    f.write_str(open)?;
    for (i, v) in items.enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{v}")?;
    }
    f.write_str(close)
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Int(n) => write!(f, "{n}"),
            Value::Char(_) | Value::String(_) => {
                write!(f, "{}", self.to_literal().expect("scalar literal"))
            }
            Value::Option(None) => f.write_str("none"),
            Value::Option(Some(v)) => write!(f, "some({v})"),
            Value::Set(s) => write_seq(f, "{", s.iter(), "}"),
            Value::Seq(s) => write_seq(f, "[", s.iter(), "]"),
            Value::Tuple(s) => write_seq(f, "(", s.iter(), ")"),
            Value::Map(m) => {
                f.write_str("{")?;
                for (i, (k, v)) in m.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{k} -> {v}")?;
                }
                f.write_str("}")
            }
            Value::Product { ty, fields } => {
                write!(f, "{ty}(")?;
                write_fields(f, fields)?;
                f.write_str(")")
            }
            Value::Sum {
                ty,
                alternative,
                fields,
            } => {
                write!(f, "{ty}::{alternative}(")?;
                write_fields(f, fields)?;
                f.write_str(")")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let p = Value::Product {
            ty: "point".into(),
            fields: vec![("x".into(), Value::int(1)), ("y".into(), Value::int(-2))],
        };
        assert_eq!(p.to_string(), "point(x = 1, y = -2)");
        assert_eq!(
            Value::Seq(vec![Value::int(1), p]).to_string(),
            "[1, point(x = 1, y = -2)]"
        );
        assert_eq!(Value::Char(b'!').to_string(), "'!'");
        assert_eq!(Value::Option(None).to_string(), "none");
    }
}
