//! Properties of S-expression text, session replay and the oracle.

use num_bigint::BigInt;
use proptest::prelude::*;

use syntheto::eval::{holds_at, test_obligation, OracleConfig, Status};
use syntheto::parse_program;
use syntheto::session::{CellStatus, Session, CELL_SEPARATOR};
use syntheto::transfer::{parse_sexpr, serialize, SExpr};
use syntheto::typecheck::check_toplevel;
use syntheto::world::World;

fn sexpr() -> impl Strategy<Value = SExpr> {
    let name = "[A-Z][A-Z0-9]{0,5}(-[A-Z0-9]{1,4})?".prop_filter("reserved", |n| n != "CODE-CHAR");
    let package = prop_oneof![Just("SYNTHETO"), Just("ACL2"), Just("KEYWORD-X")];
    let leaf = prop_oneof![
        (package, name.clone()).prop_map(|(p, n)| SExpr::Symbol {
            package: p.to_string(),
            name: n,
        }),
        name.prop_map(SExpr::Keyword),
        "[ -~\u{a0}-\u{ff}]{0,8}".prop_map(SExpr::String),
        any::<i64>().prop_map(|n| SExpr::Int(BigInt::from(n))),
        any::<u8>().prop_map(SExpr::Char),
    ];
    leaf.prop_recursive(4, 40, 5, |inner| {
        prop::collection::vec(inner, 0..5).prop_map(SExpr::List)
    })
}

const CELLS: [&str; 9] = [
    "subtype positive {x: int | x > 0}",
    "function inc(x: int) returns (y: int) { return x + 1; }",
    "function dbl(x: positive) returns (y: int) ensures y > x { return x + x; }",
    "function same(x: int) returns (y: int) ensures y > x { return x; }",
    "theorem inc_grows forall(x: int) inc(x) > x",
    "function inc(x: int) returns (y: bool) { return x; }",
    "struct pair {a: int, b: int | a <= b}",
    "function mk() returns (p: pair) { return pair(a = 1, b = 2); }",
    "function swap(p: pair) returns (q: pair) { return pair(a = p.b, b = p.a); }",
];

fn oracle(seed: u64) -> OracleConfig {
    OracleConfig {
        trials: 30,
        seed,
        ..OracleConfig::default()
    }
}

fn notebook(picks: &[usize]) -> String {
    picks
        .iter()
        .map(|&i| format!("{CELL_SEPARATOR}\n{}\n", CELLS[i]))
        .collect()
}

fn run(text: &str, seed: u64) -> Session {
    let mut s = Session::from_notebook(text, oracle(seed));
    s.run_pending(|_, _| {});
    s
}

fn statuses(s: &Session) -> Vec<CellStatus> {
    s.cells().iter().map(|c| c.status).collect()
}

fn obligation_world(theorem: &str) -> (World, syntheto::Obligation) {
    let unit = parse_program(theorem).unwrap().remove(0);
    let mut checked = check_toplevel(&World::new(), &unit).unwrap();
    (checked.world, checked.obligations.remove(0))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sexpr_text_round_trips(s in sexpr()) {
        let text = serialize(&s).unwrap();
        prop_assert_eq!(parse_sexpr(&text).unwrap(), s);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn replay_is_deterministic(picks in prop::collection::vec(0..CELLS.len(), 1..7), seed in any::<u64>()) {
        let text = notebook(&picks);
        let a = run(&text, seed);
        let b = run(&text, seed);
        prop_assert_eq!(statuses(&a), statuses(&b));
        prop_assert_eq!(a.world().canonical_text(), b.world().canonical_text());
        // a saved notebook replays to the same session
        let c = run(&a.notebook_text(), seed);
        prop_assert_eq!(statuses(&a), statuses(&c));
        prop_assert_eq!(a.world().canonical_text(), c.world().canonical_text());
    }

    #[test]
    fn a_prefix_runs_as_in_the_whole(picks in prop::collection::vec(0..CELLS.len(), 1..7), k in 0usize..7) {
        let whole = run(&notebook(&picks), 1);
        let k = k.min(picks.len());
        let prefix = run(&notebook(&picks[..k]), 1);
        prop_assert_eq!(&statuses(&whole)[..k], &statuses(&prefix)[..]);
        // at most one rejected cell, and only stale cells after it
        let st = statuses(&whole);
        if let Some(r) = st.iter().position(|s| *s == CellStatus::Rejected) {
            prop_assert!(st[..r].iter().all(|s| *s == CellStatus::Accepted));
            prop_assert!(st[r + 1..].iter().all(|s| *s == CellStatus::Stale));
            prop_assert_eq!(
                whole.world().canonical_text(),
                whole.world_before(r).unwrap().canonical_text()
            );
        } else {
            prop_assert!(st.iter().all(|s| *s == CellStatus::Accepted));
        }
        if k <= whole.accepted() {
            prop_assert_eq!(
                prefix.world().canonical_text(),
                whole.world_before(k).unwrap().canonical_text()
            );
        }
    }

    #[test]
    fn verdicts_depend_only_on_the_seed(seed in any::<u64>()) {
        let (w, ob) = obligation_world("theorem t forall(x: int, y: int) x * y <= x * x + y * y");
        let a = test_obligation(&w, &ob, &oracle(seed));
        prop_assert_eq!(&a, &test_obligation(&w, &ob, &oracle(seed)));
        prop_assert_eq!(a.status, Status::Pass);
    }

    #[test]
    fn counterexamples_refute(seed in any::<u64>()) {
        let (w, ob) = obligation_world("theorem t forall(x: int, s: seq<int>) length(s) < x + 3");
        let v = test_obligation(&w, &ob, &oracle(seed));
        prop_assert_eq!(v.status, Status::Fail);
        let env = v.counterexample.unwrap();
        prop_assert_eq!(holds_at(&w, &ob, &env), Ok(false));
    }
}

#[test]
fn the_cell_pool_behaves_as_expected() {
    use CellStatus::*;
    assert_eq!(
        statuses(&run(&notebook(&[0, 1, 2, 4, 6, 7]), 1)),
        [Accepted, Accepted, Accepted, Accepted, Accepted, Accepted]
    );
    assert_eq!(
        statuses(&run(&notebook(&[1, 5, 0]), 1)),
        [Accepted, Rejected, Stale]
    );
    assert_eq!(statuses(&run(&notebook(&[3]), 1)), [Rejected]);
    assert_eq!(statuses(&run(&notebook(&[6, 8]), 1)), [Accepted, Rejected]);
}
