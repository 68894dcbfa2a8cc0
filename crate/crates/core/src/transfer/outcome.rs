//! Per-unit results returned to the front end.

use super::encode::{
    decode_list, decode_string, decode_toplevel, encode_toplevel, list, make, DecodeError, Form,
};
use super::sexpr::SExpr;
use crate::syntax::TopLevel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeKind {
    TypeSuccess,
    FunctionSuccess,
    SpecificationSuccess,
    TheoremSuccess,
    TransformationSuccess,
    Failure,
}

impl OutcomeKind {
    fn constructor(self) -> &'static str {
        match self {
            OutcomeKind::TypeSuccess => "OUTCOME-TYPE-SUCCESS",
            OutcomeKind::FunctionSuccess => "OUTCOME-FUNCTION-SUCCESS",
            OutcomeKind::SpecificationSuccess => "OUTCOME-SPECIFICATION-SUCCESS",
            OutcomeKind::TheoremSuccess => "OUTCOME-THEOREM-SUCCESS",
            OutcomeKind::TransformationSuccess => "OUTCOME-TRANSFORMATION-SUCCESS",
            OutcomeKind::Failure => "OUTCOME-FAILURE",
        }
    }

    /// Lowercase name, as used in JSON reports.
    pub fn name(self) -> &'static str {
        match self {
            OutcomeKind::TypeSuccess => "type-success",
            OutcomeKind::FunctionSuccess => "function-success",
            OutcomeKind::SpecificationSuccess => "specification-success",
            OutcomeKind::TheoremSuccess => "theorem-success",
            OutcomeKind::TransformationSuccess => "transformation-success",
            OutcomeKind::Failure => "failure",
        }
    }

    const ALL: [OutcomeKind; 6] = [
        OutcomeKind::TypeSuccess,
        OutcomeKind::FunctionSuccess,
        OutcomeKind::SpecificationSuccess,
        OutcomeKind::TheoremSuccess,
        OutcomeKind::TransformationSuccess,
        OutcomeKind::Failure,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub kind: OutcomeKind,
    pub message: String,
    /// New definitions produced by a transformation.
    pub payload: Vec<TopLevel>,
}

impl Outcome {
    pub fn success(kind: OutcomeKind, message: impl Into<String>) -> Self {
        Outcome {
            kind,
            message: message.into(),
            payload: Vec::new(),
        }
    }

    pub fn failure(message: impl Into<String>) -> Self {
        Outcome::success(OutcomeKind::Failure, message)
    }

    pub fn is_success(&self) -> bool {
        self.kind != OutcomeKind::Failure
    }

    pub fn to_sexpr(&self) -> SExpr {
        let mut args = vec![("MESSAGE", SExpr::String(self.message.clone()))];
        if self.kind == OutcomeKind::TransformationSuccess {
            args.push((
                "FUNCTIONS",
                list(self.payload.iter().map(encode_toplevel).collect()),
            ));
        }
        make(self.kind.constructor(), args)
    }

    pub fn from_sexpr(s: &SExpr) -> Result<Outcome, DecodeError> {
        let mut f = Form::parse(s)?;
        let kind = OutcomeKind::ALL
            .into_iter()
            .find(|k| k.constructor() == f.kind)
            .ok_or_else(|| f.unknown())?;
        let message = decode_string(f.get("MESSAGE")?)?.to_string();
        let payload = if kind == OutcomeKind::TransformationSuccess {
            decode_list(f.get("FUNCTIONS")?)?
                .iter()
                .map(decode_toplevel)
                .collect::<Result<_, _>>()?
        } else {
            Vec::new()
        };
        f.finish()?;
        Ok(Outcome {
            kind,
            message,
            payload,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::sexpr::{parse_sexpr, serialize};
    use super::*;

    #[test]
    fn type_success_text() {
        let o = Outcome::success(OutcomeKind::TypeSuccess, "positive");
        let text = serialize(&o.to_sexpr()).unwrap();
        assert_eq!(
            text,
            "(SYNTHETO::MAKE-OUTCOME-TYPE-SUCCESS :MESSAGE \"positive\")"
        );
        assert_eq!(
            Outcome::from_sexpr(&parse_sexpr(&text).unwrap()).unwrap(),
            o
        );
    }

    #[test]
    fn transformation_payload_round_trips() {
        let unit =
            crate::syntax::parse_program("function f(x: int) returns (y: int) { return x; }")
                .unwrap()
                .remove(0);
        let o = Outcome {
            kind: OutcomeKind::TransformationSuccess,
            message: "f".into(),
            payload: vec![unit],
        };
        let text = serialize(&o.to_sexpr()).unwrap();
        assert_eq!(
            Outcome::from_sexpr(&parse_sexpr(&text).unwrap()).unwrap(),
            o
        );
    }
}
