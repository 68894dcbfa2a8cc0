//! Round-trip and determinism properties over generated inputs.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use syntheto::syntax::generate::random_toplevel;
use syntheto::syntax::{parse_program, print_toplevel, TopLevel};
use syntheto::transfer::{ast_to_transfer, parse_sexpr, serialize, transfer_to_ast, SExpr};

fn unit(seed: u64) -> TopLevel {
    random_toplevel(&mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn transfer_encoding_is_invertible(seed in any::<u64>()) {
        let u = unit(seed);
        let s = ast_to_transfer(&u);
        prop_assert_eq!(transfer_to_ast(&s).unwrap(), u);
    }

    #[test]
    fn serialization_is_invertible_and_deterministic(seed in any::<u64>()) {
        let s = ast_to_transfer(&unit(seed));
        let text = serialize(&s).unwrap();
        prop_assert_eq!(&parse_sexpr(&text).unwrap(), &s);
        prop_assert_eq!(serialize(&s).unwrap(), text);
    }

    #[test]
    fn printing_reparses_to_the_same_unit(seed in any::<u64>()) {
        let u = unit(seed);
        let text = print_toplevel(&u);
        let back = parse_program(&text);
        prop_assert!(back.is_ok(), "{}\n{:?}", text, back);
        prop_assert_eq!(back.unwrap(), vec![u], "{}", text);
    }

    #[test]
    fn character_atoms_round_trip(c in any::<u8>()) {
        let text = serialize(&SExpr::Char(c)).unwrap();
        prop_assert_eq!(&text, &format!("(CODE-CHAR {c})"));
        prop_assert_eq!(parse_sexpr(&text).unwrap(), SExpr::Char(c));
    }
}
