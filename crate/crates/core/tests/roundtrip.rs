mod common;

use dtsgen_core::{emit, normalize, parse_module};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn parse_inverts_emit(m in common::ast::module()) {
        let text = emit(&m).unwrap();
        let back = parse_module(&text, &m.module_name).unwrap();
        prop_assert_eq!(normalize(back), normalize(m), "{}", text);
    }
}

