//! Option schemas of the transformations.

use crate::syntax::{Expression, Identifier, OptionValue, TransformInvocation};

use super::TransformError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptionKind {
    Identifier,
    Expression,
    Bool,
}

#[derive(Clone, Copy, Debug)]
pub struct OptionSpec {
    pub name: &'static str,
    pub kind: OptionKind,
    pub required: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Schema {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub options: &'static [OptionSpec],
    /// Whether the result is simplified when `simplify` is not given.
    pub simplify_default: bool,
}

const fn opt(name: &'static str, kind: OptionKind, required: bool) -> OptionSpec {
    OptionSpec {
        name,
        kind,
        required,
    }
}

use OptionKind::{Bool, Expression as Expr, Identifier as Ident};

pub const SCHEMAS: &[Schema] = &[
    Schema {
        name: "simplify",
        aliases: &[],
        options: &[],
        simplify_default: true,
    },
    Schema {
        name: "tail_recursion",
        aliases: &[],
        options: &[opt("new_parameter_name", Ident, true)],
        simplify_default: false,
    },
    Schema {
        name: "finite_difference",
        aliases: &[],
        options: &[
            opt("expression", Expr, true),
            opt("new_parameter_name", Ident, true),
            opt("simplify", Bool, false),
        ],
        simplify_default: true,
    },
    Schema {
        name: "rename_param",
        aliases: &["rename_parameter"],
        options: &[opt("old", Ident, true), opt("new", Ident, true)],
        simplify_default: false,
    },
    Schema {
        name: "isomorphism",
        aliases: &[],
        options: &[
            opt("parameter", Ident, true),
            opt("new_parameter_name", Ident, true),
            opt("old_type", Ident, true),
            opt("new_type", Ident, true),
            opt("old_to_new", Ident, true),
            opt("new_to_old", Ident, true),
            opt("simplify", Bool, false),
        ],
        simplify_default: true,
    },
    Schema {
        name: "drop_irrelevant_param",
        aliases: &["drop_irrelevant_parameter"],
        options: &[opt("parameter", Ident, true)],
        simplify_default: false,
    },
    Schema {
        name: "wrap_output",
        aliases: &[],
        options: &[
            opt("wrap_function", Ident, true),
            opt("simplify", Bool, false),
        ],
        simplify_default: false,
    },
    Schema {
        name: "restrict",
        aliases: &[],
        options: &[opt("predicate", Expr, true)],
        simplify_default: false,
    },
];

pub fn schema(name: &str) -> Option<&'static Schema> {
    SCHEMAS
        .iter()
        .find(|s| s.name == name || s.aliases.contains(&name))
}

/// Validated options of one invocation.
#[derive(Clone, Debug)]
pub struct Options<'a> {
    pub schema: &'static Schema,
    inv: &'a TransformInvocation,
}

fn kind_of(v: &OptionValue) -> OptionKind {
    match v {
        OptionValue::Identifier(_) => OptionKind::Identifier,
        OptionValue::Bool(_) => OptionKind::Bool,
        OptionValue::Expression(_) => OptionKind::Expression,
    }
}

impl<'a> Options<'a> {
    pub fn new(inv: &'a TransformInvocation) -> Result<Options<'a>, TransformError> {
        let schema = schema(inv.transform.as_str())
            .ok_or_else(|| TransformError::UnknownTransform(inv.transform.to_string()))?;
        for (i, (name, value)) in inv.options.iter().enumerate() {
            if inv.options[..i].iter().any(|(n, _)| n == name) {
                return Err(TransformError::BadOption(format!("{name} given twice")));
            }
            let spec = schema
                .options
                .iter()
                .find(|o| o.name == name.as_str())
                .ok_or_else(|| {
                    TransformError::BadOption(format!("{} has no option {name}", schema.name))
                })?;
            let given = kind_of(value);
            // an identifier is also an expression
            let fits = given == spec.kind
                || (spec.kind == OptionKind::Expression && given == OptionKind::Identifier);
            if !fits {
                return Err(TransformError::BadOption(format!(
                    "option {name} of {} expects {:?}",
                    schema.name, spec.kind
                )));
            }
        }
        for spec in schema.options.iter().filter(|o| o.required) {
            if inv.option(spec.name).is_none() {
                return Err(TransformError::MissingOption(format!(
                    "{} requires {}",
                    schema.name, spec.name
                )));
            }
        }
        Ok(Options { schema, inv })
    }

    pub fn ident(&self, name: &str) -> Identifier {
        match self.inv.option(name) {
            Some(OptionValue::Identifier(i)) => i.clone(),
            _ => panic!("option {name} validated as an identifier"),
        }
    }

    pub fn expr(&self, name: &str) -> Expression {
        match self.inv.option(name) {
            Some(OptionValue::Expression(e)) => e.clone(),
            Some(OptionValue::Identifier(i)) => Expression::Variable(i.clone()),
            _ => panic!("option {name} validated as an expression"),
        }
    }

    pub fn simplify(&self) -> bool {
        match self.inv.option("simplify") {
            Some(OptionValue::Bool(b)) => *b,
            _ => self.schema.simplify_default,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aliases_resolve() {
        assert_eq!(
            schema("drop_irrelevant_parameter").unwrap().name,
            "drop_irrelevant_param"
        );
        assert!(schema("unfold").is_none());
    }

    #[test]
    fn simplify_defaults() {
        assert!(schema("isomorphism").unwrap().simplify_default);
        assert!(schema("finite_difference").unwrap().simplify_default);
        assert!(!schema("wrap_output").unwrap().simplify_default);
    }
}
