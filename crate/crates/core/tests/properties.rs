mod common;

use std::collections::BTreeSet;

use common::ast;
use dtsgen_core::compare::{classify_type_difference, compare, DifferenceKind, Solvability};
use dtsgen_core::infer::{merge_signatures, CandidateSignature};
use dtsgen_core::model::{DeclarationModule, TemplateKind};
use dtsgen_core::types::{ObjectShape, Property, TsType};
use dtsgen_core::{emit, expand_aliases, normalize, parse_module, tag_features};
use proptest::prelude::*;

fn reparse(m: &DeclarationModule) -> DeclarationModule {
    parse_module(&emit(m).unwrap(), &m.module_name).unwrap()
}

/// Independent count of declarations present on one side only: root
/// functions plus `Class.method` and `Class.constructor` entries, with
/// static and instance methods kept apart.
fn function_keys(m: &DeclarationModule) -> BTreeSet<(bool, String)> {
    let mut keys: BTreeSet<(bool, String)> =
        m.scope.functions.iter().map(|f| (false, f.name.clone())).collect();
    for c in &m.scope.classes {
        keys.extend(
            c.methods
                .iter()
                .map(|f| (f.modifiers.is_static, format!("{}.{}", c.name, f.name))),
        );
        if !c.constructors.is_empty() {
            keys.insert((false, format!("{}.constructor", c.name)));
        }
    }
    keys
}

fn only_in(a: &BTreeSet<(bool, String)>, b: &BTreeSet<(bool, String)>) -> BTreeSet<String> {
    a.difference(b).map(|(_, p)| p.clone()).collect()
}

fn paths(m: &DeclarationModule, other: &DeclarationModule, kind: DifferenceKind) -> BTreeSet<String> {
    compare(m, other, "m")
        .unwrap()
        .differences
        .into_iter()
        .filter(|d| d.kind == kind)
        .map(|d| d.path)
        .collect()
}

fn plain() -> impl Strategy<Value = DeclarationModule> {
    ast::module().prop_filter("module template", |m| m.template == TemplateKind::Module)
}

/// Interface method properties are compared as functions too; leaving
/// interfaces out keeps the name-set oracle exact.
fn without_interfaces() -> impl Strategy<Value = DeclarationModule> {
    plain().prop_filter("no interfaces", |m| m.scope.interfaces.is_empty())
}

fn small_type() -> impl Strategy<Value = TsType> {
    let leaf = prop_oneof![
        Just(TsType::String),
        Just(TsType::Number),
        Just(TsType::Boolean),
        Just(TsType::Null),
        Just(TsType::Undefined),
        Just(TsType::Named("RegExp".into())),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| TsType::Array(Box::new(t))),
            proptest::collection::vec(("[abc]", inner), 1..=2).prop_map(|props| {
                TsType::Shape(ObjectShape {
                    properties: props
                        .into_iter()
                        .collect::<std::collections::BTreeMap<_, _>>()
                        .into_iter()
                        .map(|(n, t)| Property::new(n, t))
                        .collect(),
                    ..Default::default()
                })
            }),
        ]
    })
}

fn candidates() -> impl Strategy<Value = Vec<CandidateSignature>> {
    (0usize..=3).prop_flat_map(|arity| {
        proptest::collection::vec(
            (proptest::collection::vec(small_type(), arity), small_type()),
            1..=6,
        )
        .prop_map(|cs| {
            cs.into_iter()
                .map(|(params, ret)| CandidateSignature {
                    params: params
                        .into_iter()
                        .enumerate()
                        .map(|(i, t)| (format!("p{i}"), t))
                        .collect(),
                    ret,
                })
                .collect()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalize_is_idempotent(m in ast::module()) {
        let once = normalize(m);
        prop_assert_eq!(normalize(once.clone()), once);
    }

    #[test]
    fn expand_aliases_is_idempotent(m in ast::module()) {
        let once = expand_aliases(reparse(&m)).unwrap();
        prop_assert_eq!(expand_aliases(once.clone()).unwrap(), once);
    }

    #[test]
    fn module_equals_itself(m in ast::module()) {
        let m = reparse(&m);
        let report = compare(&m, &m, "m").unwrap();
        prop_assert!(report.differences.is_empty(), "{:?}", report.differences);
    }

    #[test]
    fn missing_and_extra_match_name_sets(a in without_interfaces(), b in without_interfaces()) {
        let (ka, kb) = (function_keys(&a), function_keys(&b));
        let missing = paths(&a, &b, DifferenceKind::FunctionMissingDifference);
        let extra = paths(&a, &b, DifferenceKind::FunctionExtraDifference);
        prop_assert_eq!(&missing, &only_in(&ka, &kb));
        prop_assert_eq!(&extra, &only_in(&kb, &ka));
        prop_assert_eq!(missing, paths(&b, &a, DifferenceKind::FunctionExtraDifference));
        prop_assert_eq!(extra, paths(&b, &a, DifferenceKind::FunctionMissingDifference));
    }

    #[test]
    fn template_difference_stops_comparison(a in ast::module(), b in ast::module()) {
        let report = compare(&a, &b, "m").unwrap();
        if a.template != b.template {
            prop_assert_eq!(report.differences.len(), 1);
            prop_assert_eq!(report.differences[0].kind, DifferenceKind::TemplateDifference);
        } else {
            prop_assert!(report.differences.iter().all(|d| d.kind != DifferenceKind::TemplateDifference));
        }
    }

    #[test]
    fn narrower_actual_is_solvable(t in ast::ts_type(vec![]), extra in ast::ts_type(vec![])) {
        let broad = TsType::union([t.clone(), extra]);
        prop_assert_eq!(classify_type_difference((&broad, false), (&t, false)), Solvability::Solvable);
        prop_assert_eq!(classify_type_difference((&t, true), (&t, false)), Solvability::Solvable);
        prop_assert_eq!(classify_type_difference((&t, false), (&t, true)), Solvability::Unsolvable);
    }

    #[test]
    fn tags_grow_with_declarations(a in plain(), b in plain()) {
        let mut both = a.clone();
        both.scope.functions.extend(b.scope.functions.iter().map(|f| {
            let mut f = f.clone();
            f.name.push_str("_b");
            f
        }));
        prop_assert!(tag_features(&a).is_subset(&tag_features(&both)));
    }

    #[test]
    fn merge_ignores_candidate_order(
        (cs, shuffled) in candidates().prop_flat_map(|cs| (Just(cs.clone()), Just(cs).prop_shuffle()))
    ) {
        let merged = merge_signatures(&cs).unwrap();
        prop_assert_eq!(&merge_signatures(&shuffled).unwrap(), &merged);
        prop_assert_eq!(&merge_signatures(&merged).unwrap(), &merged);
        let rets: BTreeSet<String> = cs.iter().map(|c| c.ret.to_string()).collect();
        let merged_rets: Vec<String> = merged.iter().map(|c| c.ret.to_string()).collect();
        prop_assert_eq!(merged_rets.len(), rets.len());
        prop_assert_eq!(merged_rets.into_iter().collect::<BTreeSet<_>>(), rets);
    }
}
