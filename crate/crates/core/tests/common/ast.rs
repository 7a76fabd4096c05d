//! Strategies for declaration ASTs inside the subset the emitter writes
//! and the parser reads back without loss.

use dtsgen_core::model::{
    ClassDecl, ClassProperty, DeclarationModule, FunctionDecl, InterfaceDecl, Modifiers, Scope,
    TemplateKind, VariableDecl, Visibility,
};
use dtsgen_core::types::{ObjectShape, Param, Property, Signature, TsType};
use proptest::prelude::*;
use proptest::sample::subsequence;

const PARAM_NAMES: &[&str] = &["a", "b", "input", "opts", "cb", "string", "value"];
const PROP_NAMES: &[&str] = &["x", "y", "flags", "url", "is-set", "on_done", "$id"];
const METHOD_NAMES: &[&str] = &["run", "get", "toString", "isValid", "render"];
const FUNCTION_NAMES: &[&str] = &["parse", "format", "check", "load", "toObject"];
const EXPORT_NAMES: &[&str] = &["Abs", "GlobBase", "SteamID", "Greeter", "isUuid"];

fn leaf(ifaces: Vec<String>) -> BoxedStrategy<TsType> {
    let mut options = vec![
        Just(TsType::String).boxed(),
        Just(TsType::Number).boxed(),
        Just(TsType::Boolean).boxed(),
        Just(TsType::PlainObject).boxed(),
        Just(TsType::Null).boxed(),
        Just(TsType::Named("RegExp".into())).boxed(),
        Just(TsType::Named("Date".into())).boxed(),
    ];
    if !ifaces.is_empty() {
        options.push(proptest::sample::select(ifaces).prop_map(TsType::InterfaceRef).boxed());
    }
    proptest::strategy::Union::new(options).boxed()
}

fn shape_of(ty: BoxedStrategy<TsType>) -> impl Strategy<Value = ObjectShape> {
    (subsequence(PROP_NAMES, 1..=3), proptest::collection::vec((ty, any::<bool>()), 3)).prop_map(
        |(names, tys)| ObjectShape {
            properties: names
                .into_iter()
                .zip(tys)
                .map(|(n, (ty, optional))| Property {
                    optional,
                    ..Property::new(n, ty)
                })
                .collect(),
            ..Default::default()
        },
    )
}

/// A type with nested arrays, unions, callbacks and object literals.
pub fn ts_type(ifaces: Vec<String>) -> BoxedStrategy<TsType> {
    leaf(ifaces)
        .prop_recursive(3, 16, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| TsType::Array(Box::new(t))),
                proptest::collection::vec(inner.clone(), 2..=3).prop_map(TsType::union),
                signature(inner.clone(), true).prop_map(|s| TsType::Callback(Box::new(s))),
                shape_of(inner).prop_map(TsType::Shape),
            ]
        })
        .boxed()
}

/// Parameters with unique names, optionals only at the end and an
/// optional trailing rest parameter.
fn params(ty: BoxedStrategy<TsType>) -> impl Strategy<Value = Vec<Param>> {
    (
        subsequence(PARAM_NAMES, 0..=3),
        proptest::collection::vec(ty.clone(), 3),
        0usize..=3,
        proptest::option::weighted(0.2, ty),
    )
        .prop_map(|(names, tys, required, rest)| {
            let n = names.len();
            let mut out: Vec<Param> = names
                .into_iter()
                .zip(tys)
                .enumerate()
                .map(|(i, (name, ty))| Param {
                    optional: i >= required.min(n),
                    ..Param::new(name, ty)
                })
                .collect();
            if let Some(elem) = rest {
                out.push(Param {
                    rest: true,
                    ..Param::new("rest", TsType::Array(Box::new(elem)))
                });
            }
            out
        })
}

fn signature(ty: BoxedStrategy<TsType>, with_ret: bool) -> impl Strategy<Value = Signature> {
    let ret = prop_oneof![Just(TsType::Void), ty.clone()];
    (params(ty), ret).prop_map(move |(params, ret)| Signature {
        type_params: vec![],
        params,
        ret: with_ret.then_some(ret),
    })
}

fn function(name: String, ty: BoxedStrategy<TsType>) -> impl Strategy<Value = FunctionDecl> {
    proptest::collection::vec(signature(ty, true), 1..=2)
        .prop_map(move |overloads| FunctionDecl::new(name.clone(), overloads))
}

fn modifiers() -> impl Strategy<Value = Modifiers> {
    (
        any::<bool>(),
        any::<bool>(),
        proptest::sample::select(vec![
            Visibility::Unspecified,
            Visibility::Unspecified,
            Visibility::Public,
            Visibility::Private,
            Visibility::Protected,
        ]),
    )
        .prop_map(|(is_static, readonly, visibility)| Modifiers {
            is_static,
            readonly,
            visibility,
        })
}

fn class(name: String, ty: BoxedStrategy<TsType>) -> impl Strategy<Value = ClassDecl> {
    let methods = subsequence(METHOD_NAMES, 0..=3).prop_flat_map({
        let ty = ty.clone();
        move |names| {
            names
                .into_iter()
                .map(|n| {
                    (
                        proptest::collection::vec(signature(ty.clone(), true), 1..=2),
                        any::<bool>(),
                    )
                        .prop_map(move |(overloads, is_static)| FunctionDecl {
                            modifiers: Modifiers {
                                is_static,
                                ..Modifiers::default()
                            },
                            ..FunctionDecl::new(n, overloads)
                        })
                })
                .collect::<Vec<_>>()
        }
    });
    let properties = subsequence(&["count", "label", "data-id"][..], 0..=2).prop_flat_map(
        move |names| {
            names
                .into_iter()
                .map(|n| {
                    (leaf(vec![]), any::<bool>(), modifiers()).prop_map(
                        move |(ty, optional, modifiers)| ClassProperty {
                            name: n.to_string(),
                            ty,
                            optional,
                            modifiers: Modifiers {
                                readonly: modifiers.readonly,
                                ..modifiers
                            },
                        },
                    )
                })
                .collect::<Vec<_>>()
        },
    );
    (
        proptest::collection::vec(signature(ty, false), 0..=2),
        methods,
        properties,
    )
        .prop_map(move |(constructors, methods, properties)| ClassDecl {
            name: name.clone(),
            type_params: vec![],
            constructors,
            methods,
            properties,
        })
}

fn interface(name: String, ty: BoxedStrategy<TsType>) -> impl Strategy<Value = InterfaceDecl> {
    let method = signature(ty.clone(), true).prop_map(|s| TsType::Callback(Box::new(s)));
    (shape_of(ty), proptest::option::of(method)).prop_map(move |(mut shape, method)| {
        if let Some(cb) = method {
            shape.properties.push(Property {
                method: true,
                ..Property::new("handle", cb)
            });
        }
        InterfaceDecl {
            name: name.clone(),
            type_params: vec![],
            extends: vec![],
            shape,
        }
    })
}

fn variables(ty: BoxedStrategy<TsType>) -> impl Strategy<Value = Vec<VariableDecl>> {
    proptest::collection::vec((ty, any::<bool>()), 0..=1).prop_map(|vs| {
        vs.into_iter()
            .enumerate()
            .map(|(i, (ty, is_const))| VariableDecl {
                name: format!("version{i}"),
                ty: Some(ty),
                is_const,
            })
            .collect()
    })
}

/// A scope holding `iface_names` interfaces, plus functions and variables.
fn scope(
    iface_names: Vec<String>,
    refs: Vec<String>,
    max_functions: usize,
) -> impl Strategy<Value = Scope> {
    let ty = ts_type(refs);
    let interfaces = iface_names
        .into_iter()
        .map(|n| interface(n, ty.clone()))
        .collect::<Vec<_>>();
    let functions = subsequence(FUNCTION_NAMES, 0..=max_functions).prop_flat_map({
        let ty = ty.clone();
        move |names| {
            names
                .into_iter()
                .map(|n| function(n.to_string(), ty.clone()))
                .collect::<Vec<_>>()
        }
    });
    (interfaces, functions, variables(ty)).prop_map(|(interfaces, functions, variables)| Scope {
        functions,
        interfaces,
        variables,
        ..Scope::default()
    })
}

fn iface_names() -> impl Strategy<Value = Vec<String>> {
    subsequence(&["I__opts", "I__cb", "Options", "Result"][..], 0..=2)
        .prop_map(|v| v.into_iter().map(String::from).collect())
}

/// A module in one of the three templates, well formed for the emitter.
pub fn module() -> impl Strategy<Value = DeclarationModule> {
    prop_oneof![module_function(), module_class(), plain_module()]
}

fn qualified(export: &str, names: &[String]) -> Vec<String> {
    names.iter().map(|n| format!("{export}.{n}")).collect()
}

fn module_function() -> impl Strategy<Value = DeclarationModule> {
    (proptest::sample::select(EXPORT_NAMES), iface_names()).prop_flat_map(|(export, ifaces)| {
        let refs = qualified(export, &ifaces);
        let ty = ts_type(refs.clone());
        (function(export.to_string(), ty), scope(ifaces, refs, 2)).prop_map(
            move |(f, ns)| {
                let mut m = DeclarationModule::new("pkg", TemplateKind::ModuleFunction);
                m.export_assignment = Some(export.to_string());
                m.scope.functions.push(f);
                m.scope.namespaces.insert(export.to_string(), ns);
                m
            },
        )
    })
}

fn module_class() -> impl Strategy<Value = DeclarationModule> {
    (proptest::sample::select(EXPORT_NAMES), iface_names()).prop_flat_map(|(export, ifaces)| {
        let refs = qualified(export, &ifaces);
        let ty = ts_type(refs.clone());
        (class(export.to_string(), ty), scope(ifaces, refs, 2)).prop_map(move |(c, ns)| {
            let mut m = DeclarationModule::new("pkg", TemplateKind::ModuleClass);
            m.export_assignment = Some(export.to_string());
            m.scope.classes.push(c);
            m.scope.namespaces.insert(export.to_string(), ns);
            m
        })
    })
}

fn plain_module() -> impl Strategy<Value = DeclarationModule> {
    iface_names().prop_flat_map(|ifaces| {
        let ty = ts_type(ifaces.clone());
        let classes = proptest::collection::vec(class("Widget".into(), ty), 0..=1);
        (scope(ifaces.clone(), ifaces, 3), classes).prop_map(|(mut root, classes)| {
            root.classes = classes;
            let mut m = DeclarationModule::new("pkg", TemplateKind::Module);
            m.scope = root;
            m
        })
    })
}
