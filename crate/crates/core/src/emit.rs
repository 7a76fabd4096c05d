//! Pretty-printing of a [`DeclarationModule`] as `.d.ts` source.

use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{ClassDecl, DeclarationModule, FunctionDecl, Modifiers, Scope, TemplateKind, Visibility};
use crate::types::{is_identifier, write_params, ObjectShape, Signature, TsType};

const INDENT: &str = "    ";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmitError {
    #[error("{template} template requires {requirement}")]
    Template {
        template: TemplateKind,
        requirement: &'static str,
    },
}

fn check(module: &DeclarationModule) -> Result<(), EmitError> {
    let fail = |requirement| {
        Err(EmitError::Template {
            template: module.template,
            requirement,
        })
    };
    let export = module.export_assignment.as_deref();
    match module.template {
        TemplateKind::ModuleFunction => {
            if export.is_none() {
                return fail("an export assignment");
            }
            if module.scope.functions.len() != 1 || !module.scope.classes.is_empty() {
                return fail("exactly one top-level function");
            }
            if module.scope.functions[0].name != export.unwrap_or_default() {
                return fail("the exported function to match the export assignment");
            }
        }
        TemplateKind::ModuleClass => {
            if export.is_none() {
                return fail("an export assignment");
            }
            if module.scope.classes.len() != 1 || !module.scope.functions.is_empty() {
                return fail("exactly one top-level class");
            }
            if module.scope.classes[0].name != export.unwrap_or_default() {
                return fail("the exported class to match the export assignment");
            }
        }
        TemplateKind::Module => {
            if export.is_some() {
                return fail("no export assignment");
            }
        }
    }
    Ok(())
}

fn signature_tail(out: &mut String, sig: &Signature) {
    if !sig.type_params.is_empty() {
        let _ = write!(out, "<{}>", sig.type_params.join(", "));
    }
    out.push('(');
    let _ = write_params(out, &sig.params);
    out.push(')');
    if let Some(ret) = &sig.ret {
        let _ = write!(out, ": {ret}");
    }
}

fn quoted(name: &str) -> String {
    format!("'{}'", name.replace('\\', "\\\\").replace('\'', "\\'"))
}

fn member_name(name: &str) -> String {
    if is_identifier(name) {
        name.to_string()
    } else {
        quoted(name)
    }
}

fn modifiers(out: &mut String, m: &Modifiers) {
    match m.visibility {
        Visibility::Unspecified => {}
        Visibility::Public => out.push_str("public "),
        Visibility::Private => out.push_str("private "),
        Visibility::Protected => out.push_str("protected "),
    }
    if m.is_static {
        out.push_str("static ");
    }
    if m.readonly {
        out.push_str("readonly ");
    }
}

fn shape_body(out: &mut String, shape: &ObjectShape, indent: &str) {
    for p in &shape.properties {
        out.push_str(indent);
        if p.readonly {
            out.push_str("readonly ");
        }
        out.push_str(&quoted(&p.name));
        if p.optional {
            out.push('?');
        }
        match (&p.ty, p.method) {
            (TsType::Callback(sig), true) => signature_tail(out, sig),
            (ty, _) => {
                let _ = write!(out, ": {ty}");
            }
        }
        out.push_str(";\n");
    }
    for s in &shape.call_signatures {
        out.push_str(indent);
        signature_tail(out, s);
        out.push_str(";\n");
    }
    for s in &shape.construct_signatures {
        out.push_str(indent);
        out.push_str("new ");
        signature_tail(out, s);
        out.push_str(";\n");
    }
    for ix in &shape.index_signatures {
        out.push_str(indent);
        if ix.readonly {
            out.push_str("readonly ");
        }
        let _ = writeln!(out, "[{}: {}]: {};", ix.key_name, ix.key_type, ix.value);
    }
}

fn function_lines(out: &mut String, f: &FunctionDecl, indent: &str, prefix: &str) {
    for sig in &f.overloads {
        let _ = write!(out, "{indent}{prefix}function {}", f.name);
        signature_tail(out, sig);
        out.push_str(";\n");
    }
}

fn class_block(out: &mut String, c: &ClassDecl, indent: &str, prefix: &str) {
    let _ = write!(out, "{indent}{prefix}class {}", c.name);
    if !c.type_params.is_empty() {
        let _ = write!(out, "<{}>", c.type_params.join(", "));
    }
    out.push_str(" {\n");
    let inner = format!("{indent}{INDENT}");
    for sig in &c.constructors {
        let _ = write!(out, "{inner}constructor");
        signature_tail(out, &Signature { ret: None, ..sig.clone() });
        out.push_str(";\n");
    }
    for p in &c.properties {
        out.push_str(&inner);
        modifiers(out, &p.modifiers);
        out.push_str(&member_name(&p.name));
        if p.optional {
            out.push('?');
        }
        let _ = writeln!(out, ": {};", p.ty);
    }
    for m in &c.methods {
        for sig in &m.overloads {
            out.push_str(&inner);
            modifiers(out, &m.modifiers);
            out.push_str(&member_name(&m.name));
            signature_tail(out, sig);
            out.push_str(";\n");
        }
    }
    let _ = writeln!(out, "{indent}}}");
}

/// Members of a namespace body, each followed by a blank line. `prefix`
/// is the keyword put before each declaration at this level.
fn namespace_body(out: &mut String, scope: &Scope, indent: &str, prefix: &str) {
    for a in &scope.aliases {
        let _ = write!(out, "{indent}{prefix}type {}", a.name);
        if !a.type_params.is_empty() {
            let _ = write!(out, "<{}>", a.type_params.join(", "));
        }
        let _ = writeln!(out, " = {};\n", a.ty);
    }
    for i in &scope.interfaces {
        let _ = write!(out, "{indent}{prefix}interface {}", i.name);
        if !i.type_params.is_empty() {
            let _ = write!(out, "<{}>", i.type_params.join(", "));
        }
        if !i.extends.is_empty() {
            let names: Vec<String> = i.extends.iter().map(ToString::to_string).collect();
            let _ = write!(out, " extends {}", names.join(", "));
        }
        out.push_str(" {\n");
        shape_body(out, &i.shape, &format!("{indent}{INDENT}"));
        let _ = writeln!(out, "{indent}}}\n");
    }
    for v in &scope.variables {
        let kw = if v.is_const { "const" } else { "let" };
        match &v.ty {
            Some(t) => {
                let _ = writeln!(out, "{indent}{prefix}{kw} {}: {t};\n", v.name);
            }
            None => {
                let _ = writeln!(out, "{indent}{prefix}{kw} {};\n", v.name);
            }
        }
    }
    for f in &scope.functions {
        function_lines(out, f, indent, prefix);
        out.push('\n');
    }
    for c in &scope.classes {
        class_block(out, c, indent, prefix);
        out.push('\n');
    }
    for (name, ns) in &scope.namespaces {
        let _ = writeln!(out, "{indent}{prefix}namespace {name} {{");
        namespace_body(out, ns, &format!("{indent}{INDENT}"), "export ");
        let _ = writeln!(out, "{indent}}}\n");
    }
}

fn declare_namespace(out: &mut String, name: &str, scope: &Scope) {
    let _ = writeln!(out, "declare namespace {name} {{");
    namespace_body(out, scope, INDENT, "export ");
    out.push_str("}\n");
}

/// Renders the module as declaration-file text.
pub fn emit(module: &DeclarationModule) -> Result<String, EmitError> {
    check(module)?;
    let mut out = String::new();
    let scope = &module.scope;
    match module.template {
        TemplateKind::ModuleFunction | TemplateKind::ModuleClass => {
            let name = module.export_assignment.as_deref().unwrap_or_default();
            let _ = writeln!(out, "export = {name};\n");
            if module.template == TemplateKind::ModuleFunction {
                function_lines(&mut out, &scope.functions[0], "", "declare ");
            } else {
                class_block(&mut out, &scope.classes[0], "", "declare ");
                out.push('\n');
            }
            let rest = Scope {
                functions: Vec::new(),
                classes: Vec::new(),
                ..scope.clone()
            };
            let own = rest.namespaces.get(name);
            if own.is_some() || module.template == TemplateKind::ModuleClass {
                declare_namespace(&mut out, name, own.unwrap_or(&Scope::default()));
            }
            let mut others = rest.clone();
            others.namespaces.remove(name);
            if !others.is_empty() {
                out.push('\n');
                namespace_body(&mut out, &others, "", "declare ");
            }
        }
        TemplateKind::Module => {
            let rest = Scope {
                functions: Vec::new(),
                ..scope.clone()
            };
            namespace_body(&mut out, &rest, "", "export ");
            for f in &scope.functions {
                function_lines(&mut out, f, "", "export ");
            }
        }
    }
    while out.ends_with("\n\n") {
        out.pop();
    }
    if !out.ends_with('\n') {
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Param, Property};

    fn sig(params: Vec<Param>, ret: TsType) -> Signature {
        Signature {
            type_params: vec![],
            params,
            ret: Some(ret),
        }
    }

    #[test]
    fn emits_the_abs_file() {
        let mut m = DeclarationModule::new("abs", TemplateKind::ModuleFunction);
        m.export_assignment = Some("Abs".into());
        m.scope.functions.push(FunctionDecl::new(
            "Abs",
            vec![sig(vec![Param::new("input", TsType::String)], TsType::String)],
        ));
        assert_eq!(
            emit(&m).unwrap(),
            "export = Abs;\n\ndeclare function Abs(input: string): string;\n"
        );
    }

    #[test]
    fn emits_the_glob_to_regexp_file() {
        let mut m = DeclarationModule::new("glob-to-regexp", TemplateKind::ModuleFunction);
        m.export_assignment = Some("GlobToRegexp".into());
        m.scope.functions.push(FunctionDecl::new(
            "GlobToRegexp",
            vec![sig(
                vec![
                    Param::new("glob", TsType::String),
                    Param::optional("opts", TsType::InterfaceRef("GlobToRegexp.I__opts".into())),
                ],
                TsType::Named("RegExp".into()),
            )],
        ));
        let optional = |n: &str, t| Property {
            optional: true,
            ..Property::new(n, t)
        };
        m.scope.namespaces.insert(
            "GlobToRegexp".into(),
            Scope {
                interfaces: vec![crate::model::InterfaceDecl {
                    name: "I__opts".into(),
                    type_params: vec![],
                    extends: vec![],
                    shape: ObjectShape {
                        properties: vec![
                            optional("extended", TsType::Boolean),
                            optional("globstar", TsType::Boolean),
                            optional("flags", TsType::String),
                        ],
                        ..Default::default()
                    },
                }],
                ..Default::default()
            },
        );
        assert_eq!(
            emit(&m).unwrap(),
            "export = GlobToRegexp;\n\n\
             declare function GlobToRegexp(glob: string, opts?: GlobToRegexp.I__opts): RegExp;\n\
             declare namespace GlobToRegexp {\n\
             \x20   export interface I__opts {\n\
             \x20       'extended'?: boolean;\n\
             \x20       'globstar'?: boolean;\n\
             \x20       'flags'?: string;\n\
             \x20   }\n\
             \n\
             }\n"
        );
    }

    #[test]
    fn emits_the_greeter_class() {
        let mut m = DeclarationModule::new("greet-classes-module", TemplateKind::ModuleClass);
        m.export_assignment = Some("Greeter".into());
        m.scope.classes.push(ClassDecl {
            name: "Greeter".into(),
            constructors: vec![Signature {
                type_params: vec![],
                params: vec![Param::new("message", TsType::String)],
                ret: None,
            }],
            methods: vec![FunctionDecl::new("showGreeting", vec![sig(vec![], TsType::Void)])],
            ..Default::default()
        });
        assert_eq!(
            emit(&m).unwrap(),
            "export = Greeter;\n\n\
             declare class Greeter {\n\
             \x20   constructor(message: string);\n\
             \x20   showGreeting(): void;\n\
             }\n\n\
             declare namespace Greeter {\n\
             }\n"
        );
    }

    #[test]
    fn emits_module_exports() {
        let mut m = DeclarationModule::new("greet-module", TemplateKind::Module);
        m.scope.functions = vec![
            FunctionDecl::new(
                "makeGreeting",
                vec![sig(vec![Param::new("str", TsType::String)], TsType::String)],
            ),
            FunctionDecl::new("makeGoodBye", vec![sig(vec![], TsType::String)]),
        ];
        assert_eq!(
            emit(&m).unwrap(),
            "export function makeGreeting(str: string): string;\n\
             export function makeGoodBye(): string;\n"
        );
    }

    #[test]
    fn rejects_template_violations() {
        let m = DeclarationModule::new("abs", TemplateKind::ModuleFunction);
        assert!(emit(&m).is_err());
        let mut m = DeclarationModule::new("m", TemplateKind::Module);
        m.export_assignment = Some("M".into());
        assert!(emit(&m).is_err());
    }
}
