//! Equality up to consistent renaming of variables.
//!
//! Both sides are brought into a canonical form where every binder
//! (parameter, output, local, quantified or theorem variable) is renamed
//! to a positional name that no surface identifier can collide with.

use super::ast::*;

pub fn alpha_equal(a: &TopLevel, b: &TopLevel) -> bool {
    canonical(a) == canonical(b)
}

pub fn alpha_equal_functions(a: &FunctionDefinition, b: &FunctionDefinition) -> bool {
    canonical_function(a) == canonical_function(b)
}

pub fn alpha_equal_expressions(a: &Expression, b: &Expression) -> bool {
    let mut ca = Renamer::default();
    let mut cb = Renamer::default();
    ca.expr(a) == cb.expr(b)
}

pub fn canonical(u: &TopLevel) -> TopLevel {
    match u {
        TopLevel::Type(t) => TopLevel::Type(canonical_type(t)),
        TopLevel::TypeClique(ts) => TopLevel::TypeClique(ts.iter().map(canonical_type).collect()),
        TopLevel::Function(f) => TopLevel::Function(canonical_function(f)),
        TopLevel::FunctionClique(fs) => {
            TopLevel::FunctionClique(fs.iter().map(canonical_function).collect())
        }
        TopLevel::Specification(s) => {
            let mut r = Renamer::default();
            let headers: Vec<FunctionHeader> = s.headers.clone();
            let body = match &s.body {
                SpecBody::Plain(e) => SpecBody::Plain(r.expr(e)),
                SpecBody::IoRelation(e) => {
                    let h = &s.headers[0];
                    let mark = r.scope.len();
                    r.bind_all(&h.inputs);
                    r.bind_all(&h.outputs);
                    let e = r.expr(e);
                    r.scope.truncate(mark);
                    SpecBody::IoRelation(e)
                }
                SpecBody::Quantified {
                    quantifier,
                    bound,
                    matrix,
                } => {
                    let bound = r.bind_all(bound);
                    SpecBody::Quantified {
                        quantifier: *quantifier,
                        bound,
                        matrix: r.expr(matrix),
                    }
                }
            };
            let headers = match &s.body {
                SpecBody::IoRelation(_) => {
                    let mut rr = Renamer::default();
                    headers
                        .iter()
                        .map(|h| FunctionHeader {
                            name: h.name.clone(),
                            inputs: rr.bind_all(&h.inputs),
                            outputs: rr.bind_all(&h.outputs),
                        })
                        .collect()
                }
                _ => headers
                    .iter()
                    .map(|h| {
                        let mut rr = Renamer::default();
                        FunctionHeader {
                            name: h.name.clone(),
                            inputs: rr.bind_all(&h.inputs),
                            outputs: rr.bind_all(&h.outputs),
                        }
                    })
                    .collect(),
            };
            TopLevel::Specification(Specification {
                name: s.name.clone(),
                headers,
                body,
            })
        }
        TopLevel::Theorem(t) => {
            let mut r = Renamer::default();
            let variables = r.bind_all(&t.variables);
            TopLevel::Theorem(Theorem {
                name: t.name.clone(),
                variables,
                formula: r.expr(&t.formula),
            })
        }
        TopLevel::Transform(t) => TopLevel::Transform(t.clone()),
    }
}

fn canonical_type(t: &TypeDefinition) -> TypeDefinition {
    let body = match &t.body {
        TypeBody::Subtype {
            supertype,
            variable,
            restriction,
            witness,
        } => {
            let mut r = Renamer::default();
            let witness = witness.as_ref().map(|w| r.expr(w));
            let variable = r.bind(variable);
            TypeBody::Subtype {
                supertype: supertype.clone(),
                variable,
                restriction: r.expr(restriction),
                witness,
            }
        }
        other => other.clone(),
    };
    TypeDefinition {
        name: t.name.clone(),
        body,
    }
}

pub fn canonical_function(f: &FunctionDefinition) -> FunctionDefinition {
    let mut r = Renamer::default();
    let inputs = r.bind_all(&f.header.inputs);
    let precondition = f.precondition.as_ref().map(|p| r.expr(p));
    let body = match &f.body {
        FunctionBody::Regular(e) => FunctionBody::Regular(r.expr(e)),
        FunctionBody::Quantified {
            quantifier,
            bound,
            matrix,
        } => {
            let mark = r.scope.len();
            let bound = r.bind_all(bound);
            let matrix = r.expr(matrix);
            r.scope.truncate(mark);
            FunctionBody::Quantified {
                quantifier: *quantifier,
                bound,
                matrix,
            }
        }
    };
    let outputs = r.bind_all(&f.header.outputs);
    let postcondition = f.postcondition.as_ref().map(|p| r.expr(p));
    FunctionDefinition {
        header: FunctionHeader {
            name: f.header.name.clone(),
            inputs,
            outputs,
        },
        precondition,
        postcondition,
        body,
    }
}

#[derive(Default)]
struct Renamer {
    scope: Vec<(Identifier, Identifier)>,
    counter: usize,
}

impl Renamer {
    fn bind(&mut self, name: &Identifier) -> Identifier {
        let fresh = Identifier::unchecked(format!("#{}", self.counter));
        self.counter += 1;
        self.scope.push((name.clone(), fresh.clone()));
        fresh
    }

    fn bind_all(&mut self, names: &[TypedName]) -> Vec<TypedName> {
        names
            .iter()
            .map(|n| TypedName {
                name: self.bind(&n.name),
                ty: n.ty.clone(),
            })
            .collect()
    }

    fn lookup(&self, name: &Identifier) -> Identifier {
        self.scope
            .iter()
            .rev()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(|| name.clone())
    }

    fn expr(&mut self, e: &Expression) -> Expression {
        match e {
            Expression::Variable(v) => Expression::Variable(self.lookup(v)),
            Expression::Bind { locals, body } => {
                let values: Vec<Expression> = locals.iter().map(|l| self.expr(&l.value)).collect();
                let mark = self.scope.len();
                let locals = locals
                    .iter()
                    .zip(values)
                    .map(|(l, value)| LocalBinding {
                        name: self.bind(&l.name),
                        ty: l.ty.clone(),
                        value,
                    })
                    .collect();
                let body = self.expr(body);
                self.scope.truncate(mark);
                Expression::Bind {
                    locals,
                    body: Box::new(body),
                }
            }
            e => e.map_children(|c| self.expr(c)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_program;
    use super::*;

    fn unit(src: &str) -> TopLevel {
        parse_program(src).unwrap().remove(0)
    }

    #[test]
    fn parameter_renaming() {
        let a = unit("function f(x: int) returns (r: int) { return x; }");
        let b = unit("function f(y: int) returns (s: int) { return y; }");
        let c = unit("function g(x: int) returns (r: int) { return x; }");
        assert!(alpha_equal(&a, &b));
        assert!(!alpha_equal(&a, &c));
    }

    #[test]
    fn locals_and_shadowing() {
        let a = unit("function f(x: int) returns (r: int) { let y: int = x + 1; return y * x; }");
        let b = unit("function f(a: int) returns (r: int) { let b: int = a + 1; return b * a; }");
        let c = unit("function f(a: int) returns (r: int) { let b: int = a + 1; return a * a; }");
        assert!(alpha_equal(&a, &b));
        assert!(!alpha_equal(&a, &c));
    }

    #[test]
    fn free_names_are_significant() {
        let a = unit("theorem t forall(x: int) x + y == 0");
        let b = unit("theorem t forall(z: int) z + y == 0");
        let c = unit("theorem t forall(z: int) z + w == 0");
        assert!(alpha_equal(&a, &b));
        assert!(!alpha_equal(&a, &c));
    }
}
