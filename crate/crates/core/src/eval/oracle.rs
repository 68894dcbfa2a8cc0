//! Randomized testing of obligations and specifications.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::syntax::{FunctionHeader, Identifier, SpecBody, Specification, TypedName};
use crate::typecheck::Obligation;
use crate::world::World;

use super::random::Sampler;
use super::{Env, EvalError, Evaluator, Value};

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_SIZE: usize = 20;
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
/// Sampling gives up after `trials * DISCARD_RATIO` attempts.
pub const DISCARD_RATIO: usize = 50;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleConfig {
    pub trials: usize,
    pub size: usize,
    pub seed: u64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            trials: DEFAULT_TRIALS,
            size: DEFAULT_SIZE,
            seed: DEFAULT_SEED,
        }
    }
}

impl OracleConfig {
    /// Size for attempt `i`: sizes ramp from 0 to `size` and wrap.
    pub fn size_at(&self, i: usize) -> usize {
        i % (self.size + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub status: Status,
    /// Samples that satisfied every hypothesis.
    pub satisfied: usize,
    pub attempts: usize,
    pub seed: u64,
    pub counterexample: Option<Vec<(Identifier, Value)>>,
    pub detail: Option<String>,
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{:?} after {} of {} samples (seed {:#x})",
            self.status, self.satisfied, self.attempts, self.seed
        )
        .to_lowercase();
        if let Some(ce) = &self.counterexample {
            let b: Vec<String> = ce.iter().map(|(n, v)| format!("{n} = {v}")).collect();
            s.push_str(&format!("; counterexample {{{}}}", b.join(", ")));
        }
        if let Some(d) = &self.detail {
            s.push_str(&format!("; {d}"));
        }
        s
    }
}

enum Sample {
    Discard,
    Holds,
    Fails(Option<String>),
    Undecided(String),
}

/// Samples bindings for `variables` until `trials` of them satisfy every
/// hypothesis, then reports whether `check` held on all of them.
fn run_trials(
    ev: &Evaluator,
    variables: &[TypedName],
    config: &OracleConfig,
    mut check: impl FnMut(&Env) -> Sample,
) -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let max_attempts = config.trials.saturating_mul(DISCARD_RATIO).max(1);
    let mut satisfied = 0;
    let mut attempts = 0;
    let verdict = |status, satisfied, attempts, counterexample, detail| Verdict {
        status,
        satisfied,
        attempts,
        seed: config.seed,
        counterexample,
        detail,
    };
    while satisfied < config.trials && attempts < max_attempts {
        let size = config.size_at(attempts);
        attempts += 1;
        let mut env: Env = Vec::with_capacity(variables.len());
        let mut sampler = Sampler::default();
        for v in variables {
            match sampler.value(ev, &v.ty, size, &mut rng) {
                Ok(x) => env.push((v.name.clone(), x)),
                Err(e) => {
                    return verdict(
                        Status::Undecided,
                        satisfied,
                        attempts,
                        None,
                        Some(format!("cannot generate {}: {e}", v.ty)),
                    )
                }
            }
        }
        match check(&env) {
            Sample::Discard => {}
            Sample::Holds => satisfied += 1,
            Sample::Fails(detail) => {
                return verdict(Status::Fail, satisfied, attempts, Some(env), detail)
            }
            Sample::Undecided(d) => {
                return verdict(Status::Undecided, satisfied, attempts, None, Some(d))
            }
        }
    }
    if satisfied >= config.trials {
        verdict(Status::Pass, satisfied, attempts, None, None)
    } else {
        verdict(
            Status::Undecided,
            satisfied,
            attempts,
            None,
            Some("hypotheses rarely satisfied".into()),
        )
    }
}

fn judge(result: Result<bool, EvalError>) -> Sample {
    match result {
        Ok(true) => Sample::Holds,
        Ok(false) => Sample::Fails(None),
        Err(EvalError::NonExecutable(f)) => Sample::Undecided(format!("{f} is not executable")),
        Err(e) => Sample::Fails(Some(format!("evaluation error: {e}"))),
    }
}

/// Tests an obligation against random samples of its variables.
pub fn test_obligation(world: &World, ob: &Obligation, config: &OracleConfig) -> Verdict {
    let ev = Evaluator::new(world);
    // a closed formula has one sample
    let closed = OracleConfig {
        trials: config.trials.min(1),
        ..*config
    };
    let config = if ob.variables.is_empty() {
        &closed
    } else {
        config
    };
    run_trials(&ev, &ob.variables, config, |env| {
        for h in &ob.hypotheses {
            match ev.eval_bool(h, env) {
                Ok(true) => {}
                Err(EvalError::NonExecutable(f)) => {
                    return Sample::Undecided(format!("{f} is not executable"))
                }
                _ => return Sample::Discard,
            }
        }
        judge(ev.eval_bool(&ob.conclusion, env))
    })
}

/// Re-evaluates an obligation under one binding.
pub fn holds_at(world: &World, ob: &Obligation, env: &Env) -> Result<bool, EvalError> {
    let ev = Evaluator::new(world);
    for h in &ob.hypotheses {
        if !ev.eval_bool(h, env)? {
            return Ok(true);
        }
    }
    ev.eval_bool(&ob.conclusion, env)
}

/// Tests a specification with its function variables bound to world
/// functions, in header order.
pub fn check_spec(
    world: &World,
    spec: &Specification,
    implementations: &[Identifier],
    config: &OracleConfig,
) -> Verdict {
    let mut ev = Evaluator::new(world);
    for (h, f) in spec.headers.iter().zip(implementations) {
        ev.bind_function(h.name.clone(), f.clone());
    }
    match &spec.body {
        SpecBody::Plain(body) => run_trials(&ev, &[], config, |env| judge(ev.eval_bool(body, env))),
        SpecBody::Quantified {
            quantifier,
            bound,
            matrix,
        } => match quantifier {
            crate::syntax::Quantifier::Forall => {
                run_trials(&ev, bound, config, |env| judge(ev.eval_bool(matrix, env)))
            }
            crate::syntax::Quantifier::Exists => {
                // look for a witness; its absence is never a failure
                let mut found = false;
                let v = run_trials(&ev, bound, config, |env| {
                    if found || ev.eval_bool(matrix, env).unwrap_or(false) {
                        found = true;
                    }
                    Sample::Holds
                });
                Verdict {
                    status: if found {
                        Status::Pass
                    } else {
                        Status::Undecided
                    },
                    ..v
                }
            }
        },
        SpecBody::IoRelation(rel) => {
            let header: &FunctionHeader = &spec.headers[0];
            let f = implementations[0].as_str();
            run_trials(&ev, &header.inputs, config, |env| {
                let args: Vec<Value> = env.iter().map(|(_, v)| v.clone()).collect();
                let out = match ev.call(f, args) {
                    Ok(v) => v,
                    Err(EvalError::GuardViolation { .. }) => return Sample::Discard,
                    Err(e) => return judge(Err(e)),
                };
                let mut env = env.clone();
                if header.outputs.len() == 1 {
                    env.push((header.outputs[0].name.clone(), out));
                } else if let Value::Tuple(vs) = out {
                    env.extend(header.outputs.iter().map(|o| o.name.clone()).zip(vs));
                }
                judge(ev.eval_bool(rel, &env))
            })
        }
    }
}
