//! Builtin operations on values, shared by the surface and core evaluators.
//! Operations are named by their core names.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::{EvalError, Value};

fn ty_err(op: &str, args: &[Value]) -> EvalError {
    let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    EvalError::Type(format!("{op} applied to ({})", shown.join(", ")))
}

fn guard(formula: &str, args: &[Value]) -> EvalError {
    let shown: Vec<String> = args.iter().map(|a| a.to_string()).collect();
    EvalError::GuardViolation {
        guard: formula.to_string(),
        detail: format!("arguments ({})", shown.join(", ")),
    }
}

fn ints<'a>(op: &str, args: &'a [Value]) -> Result<(&'a BigInt, &'a BigInt), EvalError> {
    match args {
        [Value::Int(a), Value::Int(b)] => Ok((a, b)),
        _ => Err(ty_err(op, args)),
    }
}

fn collection_len(v: &Value) -> Option<usize> {
    Some(match v {
        Value::Seq(s) => s.len(),
        Value::Set(s) => s.len(),
        Value::Map(m) => m.len(),
        Value::String(s) => s.chars().count(),
        _ => return None,
    })
}

/// Applies a strict builtin. `and`, `or`, `implies` and friends are
/// accepted here too but callers wanting short-circuit evaluation handle
/// them before evaluating arguments.
pub fn apply(op: &str, args: Vec<Value>) -> Result<Value, EvalError> {
    let a = &args[..];
    Ok(match op {
        "+" => {
            let (x, y) = ints(op, a)?;
            Value::Int(x + y)
        }
        "-" => {
            let (x, y) = ints(op, a)?;
            Value::Int(x - y)
        }
        "*" => {
            let (x, y) = ints(op, a)?;
            Value::Int(x * y)
        }
        "div" | "rem" => {
            let (x, y) = ints(op, a)?;
            if y.is_zero() {
                return Err(guard("divisor != 0", a));
            }
            // BigInt division truncates toward zero
            Value::Int(if op == "div" { x / y } else { x % y })
        }
        "<" | "<=" | ">" | ">=" => {
            let ord = match a {
                [Value::Int(x), Value::Int(y)] => x.cmp(y),
                [Value::Char(x), Value::Char(y)] => x.cmp(y),
                [Value::String(x), Value::String(y)] => x.cmp(y),
                _ => return Err(ty_err(op, a)),
            };
            Value::Bool(match op {
                "<" => ord.is_lt(),
                "<=" => ord.is_le(),
                ">" => ord.is_gt(),
                _ => ord.is_ge(),
            })
        }
        "equal" => match a {
            [x, y] => Value::Bool(x == y),
            _ => return Err(ty_err(op, a)),
        },
        "/=" => match a {
            [x, y] => Value::Bool(x != y),
            _ => return Err(ty_err(op, a)),
        },
        "and" | "or" => {
            let bs = a
                .iter()
                .map(|v| v.as_bool().ok_or_else(|| ty_err(op, a)))
                .collect::<Result<Vec<_>, _>>()?;
            Value::Bool(if op == "and" {
                bs.iter().all(|b| *b)
            } else {
                bs.iter().any(|b| *b)
            })
        }
        "implies" | "implied" | "iff" => match a {
            [Value::Bool(x), Value::Bool(y)] => Value::Bool(match op {
                "implies" => !x || *y,
                "implied" => *x || !y,
                _ => x == y,
            }),
            _ => return Err(ty_err(op, a)),
        },
        "not" => match a {
            [Value::Bool(x)] => Value::Bool(!x),
            _ => return Err(ty_err(op, a)),
        },
        "unary--" => match a {
            [Value::Int(x)] => Value::Int(-x),
            _ => return Err(ty_err(op, a)),
        },
        "mv" => Value::Tuple(args),
        "mv-nth" => match a {
            [Value::Int(i), Value::Tuple(vs)] => i
                .to_usize()
                .and_then(|i| vs.get(i).cloned())
                .ok_or_else(|| ty_err(op, a))?,
            _ => return Err(ty_err(op, a)),
        },
        "some" => match args.into_iter().next() {
            Some(v) => Value::Option(Some(Box::new(v))),
            None => return Err(EvalError::Type("some of nothing".into())),
        },
        "none" => Value::Option(None),
        "len" => match a {
            [c] => Value::Int(collection_len(c).ok_or_else(|| ty_err(op, a))?.into()),
            _ => return Err(ty_err(op, a)),
        },
        "endp" => match a {
            [c] => Value::Bool(collection_len(c).ok_or_else(|| ty_err(op, a))? == 0),
            _ => return Err(ty_err(op, a)),
        },
        "car" => match a {
            [Value::Seq(s)] => s.first().cloned().ok_or_else(|| guard("!is_empty(s)", a))?,
            _ => return Err(ty_err(op, a)),
        },
        "cdr" => match a {
            [Value::Seq(s)] if s.is_empty() => return Err(guard("!is_empty(s)", a)),
            [Value::Seq(s)] => Value::Seq(s[1..].to_vec()),
            _ => return Err(ty_err(op, a)),
        },
        "member" => match a {
            [x, Value::Seq(s)] => Value::Bool(s.contains(x)),
            [x, Value::Set(s)] => Value::Bool(s.contains(x)),
            [x, Value::Map(m)] => Value::Bool(m.contains_key(x)),
            _ => return Err(ty_err(op, a)),
        },
        "add" | "remove" => match args.as_slice() {
            [Value::Set(_), _] => {
                let mut it = args.into_iter();
                let (Some(Value::Set(mut s)), Some(x)) = (it.next(), it.next()) else {
                    unreachable!()
                };
                if op == "add" {
                    s.insert(x);
                } else {
                    s.remove(&x);
                }
                Value::Set(s)
            }
            _ => return Err(ty_err(op, a)),
        },
        "get" => match a {
            [Value::Map(m), k] => m.get(k).cloned().ok_or_else(|| guard("member(k, m)", a))?,
            _ => return Err(ty_err(op, a)),
        },
        "put" => match a {
            [Value::Map(m), k, v] => {
                let mut m = m.clone();
                m.insert(k.clone(), v.clone());
                Value::Map(m)
            }
            _ => return Err(ty_err(op, a)),
        },
        "keys" => match a {
            [Value::Map(m)] => Value::Set(m.keys().cloned().collect()),
            _ => return Err(ty_err(op, a)),
        },
        "abs" => match a {
            [Value::Int(x)] => Value::Int(x.abs()),
            _ => return Err(ty_err(op, a)),
        },
        "gcd" => {
            let (x, y) = ints(op, a)?;
            Value::Int(x.gcd(y))
        }
        "max" | "min" => {
            let (x, y) = ints(op, a)?;
            Value::Int(if (op == "max") == (x >= y) {
                x.clone()
            } else {
                y.clone()
            })
        }
        "prepend" => match a {
            [x, Value::Seq(s)] => {
                let mut out = Vec::with_capacity(s.len() + 1);
                out.push(x.clone());
                out.extend(s.iter().cloned());
                Value::Seq(out)
            }
            _ => return Err(ty_err(op, a)),
        },
        "append" => match a {
            [Value::Seq(s), x] => {
                let mut out = s.clone();
                out.push(x.clone());
                Value::Seq(out)
            }
            _ => return Err(ty_err(op, a)),
        },
        "concat" => match a {
            [Value::Seq(s), Value::Seq(t)] => {
                let mut out = s.clone();
                out.extend(t.iter().cloned());
                Value::Seq(out)
            }
            [Value::String(s), Value::String(t)] => Value::String(format!("{s}{t}")),
            _ => return Err(ty_err(op, a)),
        },
        _ => return Err(EvalError::Unknown(op.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i(n: i64) -> Value {
        Value::int(n)
    }

    #[test]
    fn division_truncates_toward_zero() {
        assert_eq!(apply("div", vec![i(-7), i(2)]).unwrap(), i(-3));
        assert_eq!(apply("rem", vec![i(-7), i(2)]).unwrap(), i(-1));
        assert_eq!(apply("rem", vec![i(7), i(-2)]).unwrap(), i(1));
        assert!(matches!(
            apply("div", vec![i(1), i(0)]),
            Err(EvalError::GuardViolation { .. })
        ));
    }

    #[test]
    fn gcd_is_nonnegative() {
        assert_eq!(apply("gcd", vec![i(-4), i(6)]).unwrap(), i(2));
        assert_eq!(apply("gcd", vec![i(0), i(0)]).unwrap(), i(0));
    }

    #[test]
    fn first_of_empty_violates_guard() {
        assert!(matches!(
            apply("car", vec![Value::Seq(vec![])]),
            Err(EvalError::GuardViolation { .. })
        ));
    }
}
