//! Structural comparison of an expected (reference) declaration module
//! against an actual (generated) one.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{normalize, ClassDecl, DeclarationModule, FeatureTag, FunctionDecl, Scope, TemplateKind};
use crate::naming::fold_identifier;
use crate::parse::{expand_aliases, parse_module, ParseError};
use crate::types::{ObjectShape, Param, Signature, TsType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DifferenceKind {
    TemplateDifference,
    ExportAssignmentDifference,
    FunctionMissingDifference,
    FunctionExtraDifference,
    FunctionOverloadingDifference,
    ParameterMissingDifference,
    ParameterExtraDifference,
    ParameterTypeDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Solvability {
    Solvable,
    Unsolvable,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Difference {
    pub kind: DifferenceKind,
    pub path: String,
    pub expected: String,
    pub actual: String,
    pub solvability: Solvability,
}

impl Difference {
    fn new(kind: DifferenceKind, path: &str, expected: String, actual: String) -> Self {
        Difference {
            kind,
            path: path.to_string(),
            expected,
            actual,
            solvability: Solvability::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub module: String,
    pub template: TemplateKind,
    pub differences: Vec<Difference>,
    pub tags: BTreeSet<FeatureTag>,
}

impl ComparisonReport {
    /// JSON with four-space indentation and a trailing newline.
    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let fmt = serde_json::ser::PrettyFormatter::with_indent(b"    ");
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
        self.serialize(&mut ser)
            .expect("comparison report is always serializable");
        let mut s = String::from_utf8(buf).expect("serde_json writes UTF-8");
        s.push('\n');
        s
    }

    pub fn count(&self, kind: DifferenceKind) -> usize {
        self.differences.iter().filter(|d| d.kind == kind).count()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CompareError {
    #[error("{side} file still contains type aliases; expand them before comparing")]
    UnexpandedAliases { side: &'static str },
    #[error("cannot parse {side} file: {source}")]
    Parse {
        side: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("expected file uses unimplemented features: {}", names(.0))]
    Filtered(BTreeSet<FeatureTag>),
}

fn names(tags: &BTreeSet<FeatureTag>) -> String {
    tags.iter().map(|t| t.name()).collect::<Vec<_>>().join(", ")
}

fn has_aliases(scope: &Scope) -> bool {
    !scope.aliases.is_empty() || scope.namespaces.values().any(has_aliases)
}

/// Splits `T | undefined` into `T` plus optionality.
fn effective(ty: &TsType, optional: bool) -> (Option<TsType>, bool) {
    match ty.without_undefined() {
        Some(t) if ty.contains_member(&TsType::Undefined) => (Some(t), true),
        None if *ty == TsType::Undefined => (None, true),
        _ => (Some(ty.clone()), optional),
    }
}

/// Whether more observations could turn `actual` into `expected`: the
/// actual union is covered member-wise by the expected one, and object
/// types gain properties.
fn generalizes(expected: &TsType, actual: &TsType) -> bool {
    if expected == actual {
        return true;
    }
    actual
        .members()
        .into_iter()
        .all(|a| expected.members().into_iter().any(|e| member_generalizes(e, a)))
}

fn member_generalizes(e: &TsType, a: &TsType) -> bool {
    match (e, a) {
        _ if e == a => true,
        (TsType::Shape(es), TsType::Shape(as_)) => shape_generalizes(es, as_),
        (TsType::Shape(_), TsType::PlainObject) => true,
        (TsType::Array(ee), TsType::Array(ae)) => generalizes(ee, ae),
        _ => false,
    }
}

fn shape_generalizes(e: &ObjectShape, a: &ObjectShape) -> bool {
    a.properties.iter().all(|ap| match e.property(&ap.name) {
        Some(ep) => {
            classify_type_difference((&ep.ty, ep.optional), (&ap.ty, ap.optional))
                == Solvability::Solvable
                || (ep.ty == ap.ty && ep.optional == ap.optional)
        }
        None => false,
    })
}

/// Classifies a parameter or property type difference. Types must have
/// interface references already replaced by their shapes.
pub fn classify_type_difference(expected: (&TsType, bool), actual: (&TsType, bool)) -> Solvability {
    let (et, eo) = effective(expected.0, expected.1);
    let (at, ao) = effective(actual.0, actual.1);
    if ao && !eo {
        return Solvability::Unsolvable;
    }
    let ok = match (&et, &at) {
        // Only `undefined` was seen: any other type is still reachable.
        (_, None) => true,
        (None, Some(_)) => false,
        (Some(e), Some(a)) => generalizes(e, a),
    };
    if ok {
        Solvability::Solvable
    } else {
        Solvability::Unsolvable
    }
}

fn find_interface<'a>(scope: &'a Scope, path: &str) -> Option<&'a ObjectShape> {
    let (ns, name) = match path.rsplit_once('.') {
        Some((ns, name)) => (Some(ns), name),
        None => (None, path),
    };
    let mut s = scope;
    if let Some(ns) = ns {
        for part in ns.split('.') {
            s = s.namespaces.get(part)?;
        }
    }
    s.interface(name).map(|i| &i.shape)
}

/// Replaces interface references by their shapes, recursively, stopping
/// at references already being expanded.
fn inline(ty: &TsType, scope: &Scope, stack: &mut Vec<String>) -> TsType {
    ty.clone()
        .map(&mut |t| match t {
            TsType::InterfaceRef(name) if !stack.contains(&name) => {
                match find_interface(scope, &name) {
                    Some(shape) => {
                        stack.push(name);
                        let out = TsType::Shape(
                            shape.clone().map_types(&mut |m| inline(&m, scope, stack)),
                        );
                        stack.pop();
                        out
                    }
                    None => TsType::InterfaceRef(name),
                }
            }
            other => other,
        })
        .canonicalize()
}

struct Comparer<'a> {
    expected: &'a DeclarationModule,
    actual: &'a DeclarationModule,
    out: Vec<Difference>,
    seen: BTreeSet<(String, String)>,
}

fn render_param(p: Option<&Param>) -> String {
    p.map(ToString::to_string).unwrap_or_default()
}

fn render_overloads(f: &FunctionDecl) -> String {
    f.overloads
        .iter()
        .map(|s| format!("{}{s}", f.name))
        .collect::<Vec<_>>()
        .join("; ")
}

/// The single object member of a type, with the rest of the union.
fn split_object(ty: &TsType) -> Option<(&TsType, Vec<&TsType>)> {
    let members = ty.members();
    let objects: Vec<&TsType> = members
        .iter()
        .copied()
        .filter(|m| matches!(m, TsType::InterfaceRef(_) | TsType::Shape(_)))
        .collect();
    if objects.len() != 1 {
        return None;
    }
    let rest = members.into_iter().filter(|m| *m != objects[0]).collect();
    Some((objects[0], rest))
}

impl Comparer<'_> {
    fn push(&mut self, d: Difference) {
        self.out.push(d);
    }

    fn inline_expected(&self, ty: &TsType) -> TsType {
        inline(ty, &self.expected.scope, &mut Vec::new())
    }

    fn inline_actual(&self, ty: &TsType) -> TsType {
        inline(ty, &self.actual.scope, &mut Vec::new())
    }

    fn object_shape<'s>(&self, ty: &'s TsType, side_scope: &'s Scope) -> Option<(String, &'s ObjectShape)> {
        match ty {
            TsType::InterfaceRef(n) => find_interface(side_scope, n).map(|s| (n.clone(), s)),
            TsType::Shape(s) => Some((String::new(), s)),
            _ => None,
        }
    }

    /// Compares one parameter or property slot.
    fn compare_slot(&mut self, path: &str, e: (&TsType, bool), a: (&TsType, bool), render: (String, String)) {
        let (et, eo) = effective(e.0, e.1);
        let (at, ao) = effective(a.0, a.1);
        // Object members are compared property by property.
        if let (Some(et), Some(at)) = (&et, &at) {
            if let (Some((eobj, erest)), Some((aobj, arest))) = (split_object(et), split_object(at)) {
                let erest: Vec<TsType> = erest.into_iter().map(|t| self.inline_expected(t)).collect();
                let arest: Vec<TsType> = arest.into_iter().map(|t| self.inline_actual(t)).collect();
                let (expected, actual) = (self.expected, self.actual);
                if let (Some((en, es)), Some((an, as_))) = (
                    self.object_shape(eobj, &expected.scope),
                    self.object_shape(aobj, &actual.scope),
                ) {
                    if eo != ao || TsType::union(erest.clone()) != TsType::union(arest.clone()) {
                        let erest_t = TsType::union(erest.into_iter().chain([TsType::PlainObject]));
                        let arest_t = TsType::union(arest.into_iter().chain([TsType::PlainObject]));
                        let mut d = Difference::new(DifferenceKind::ParameterTypeDifference, path, render.0, render.1);
                        d.solvability = classify_type_difference((&erest_t, eo), (&arest_t, ao));
                        self.push(d);
                    }
                    let prefix = if !an.is_empty() {
                        an.clone()
                    } else if !en.is_empty() {
                        en.clone()
                    } else {
                        path.to_string()
                    };
                    if (en.is_empty() && an.is_empty()) || self.seen.insert((en, an)) {
                        self.compare_shapes(&prefix, es, as_);
                    }
                    return;
                }
            }
        }
        let ei = et.as_ref().map(|t| self.inline_expected(t));
        let ai = at.as_ref().map(|t| self.inline_actual(t));
        if ei == ai && eo == ao {
            return;
        }
        let u = TsType::Undefined;
        let mut d = Difference::new(DifferenceKind::ParameterTypeDifference, path, render.0, render.1);
        d.solvability = classify_type_difference((ei.as_ref().unwrap_or(&u), eo), (ai.as_ref().unwrap_or(&u), ao));
        self.push(d);
    }

    fn compare_shapes(&mut self, prefix: &str, e: &ObjectShape, a: &ObjectShape) {
        let names: BTreeSet<&str> = e
            .properties
            .iter()
            .chain(&a.properties)
            .map(|p| p.name.as_str())
            .collect();
        for name in names {
            let path = format!("{prefix}.{name}");
            match (e.property(name), a.property(name)) {
                (Some(ep), None) => {
                    let kind = if ep.method {
                        DifferenceKind::FunctionMissingDifference
                    } else {
                        DifferenceKind::ParameterMissingDifference
                    };
                    self.push(Difference::new(kind, &path, render_prop(ep), String::new()));
                }
                (None, Some(ap)) => {
                    let kind = if ap.method {
                        DifferenceKind::FunctionExtraDifference
                    } else {
                        DifferenceKind::ParameterExtraDifference
                    };
                    self.push(Difference::new(kind, &path, String::new(), render_prop(ap)));
                }
                (Some(ep), Some(ap)) => match (&ep.ty, &ap.ty, ep.method && ap.method) {
                    (TsType::Callback(es), TsType::Callback(as_), true) => {
                        if ep.optional != ap.optional {
                            let mut d = Difference::new(
                                DifferenceKind::ParameterTypeDifference,
                                &path,
                                render_prop(ep),
                                render_prop(ap),
                            );
                            d.solvability = if ap.optional {
                                Solvability::Unsolvable
                            } else {
                                Solvability::Solvable
                            };
                            self.push(d);
                        }
                        self.compare_params(&path, &es.params, &as_.params);
                    }
                    _ => self.compare_slot(
                        &path,
                        (&ep.ty, ep.optional),
                        (&ap.ty, ap.optional),
                        (render_prop(ep), render_prop(ap)),
                    ),
                },
                (None, None) => unreachable!(),
            }
        }
    }

    fn compare_params(&mut self, path: &str, e: &[Param], a: &[Param]) {
        for i in 0..e.len().max(a.len()) {
            let (ep, ap) = (e.get(i), a.get(i));
            let name = ep.or(ap).map(|p| p.name.as_str()).unwrap_or_default();
            let ppath = format!("{path}.{name}");
            match (ep, ap) {
                (Some(ep), None) => self.push(Difference::new(
                    DifferenceKind::ParameterMissingDifference,
                    &ppath,
                    render_param(Some(ep)),
                    String::new(),
                )),
                (None, Some(ap)) => self.push(Difference::new(
                    DifferenceKind::ParameterExtraDifference,
                    &ppath,
                    String::new(),
                    render_param(Some(ap)),
                )),
                (Some(ep), Some(ap)) => {
                    if ep.rest != ap.rest {
                        let mut d = Difference::new(
                            DifferenceKind::ParameterTypeDifference,
                            &ppath,
                            render_param(Some(ep)),
                            render_param(Some(ap)),
                        );
                        d.solvability = Solvability::Unsolvable;
                        self.push(d);
                        continue;
                    }
                    self.compare_slot(
                        &ppath,
                        (&ep.ty, ep.optional),
                        (&ap.ty, ap.optional),
                        (render_param(Some(ep)), render_param(Some(ap))),
                    );
                }
                (None, None) => unreachable!(),
            }
        }
    }

    fn compare_function(&mut self, path: &str, e: &FunctionDecl, a: &FunctionDecl) {
        if e.overloads.len() != a.overloads.len() {
            self.push(Difference::new(
                DifferenceKind::FunctionOverloadingDifference,
                path,
                render_overloads(e),
                render_overloads(a),
            ));
            return;
        }
        for (es, as_) in e.overloads.iter().zip(&a.overloads) {
            self.compare_signature(path, es, as_);
        }
    }

    fn compare_signature(&mut self, path: &str, e: &Signature, a: &Signature) {
        self.compare_params(path, &e.params, &a.params);
    }

    fn compare_functions(&mut self, prefix: &str, e: &[FunctionDecl], a: &[FunctionDecl]) {
        let by_name = |fs: &[FunctionDecl]| -> BTreeMap<(bool, String), FunctionDecl> {
            fs.iter()
                .map(|f| ((f.modifiers.is_static, f.name.clone()), f.clone()))
                .collect()
        };
        let (em, am) = (by_name(e), by_name(a));
        let keys: BTreeSet<&(bool, String)> = em.keys().chain(am.keys()).collect();
        for key in keys {
            let path = join(prefix, &key.1);
            match (em.get(key), am.get(key)) {
                (Some(ef), Some(af)) => self.compare_function(&path, ef, af),
                (Some(ef), None) => self.push(Difference::new(
                    DifferenceKind::FunctionMissingDifference,
                    &path,
                    render_overloads(ef),
                    String::new(),
                )),
                (None, Some(af)) => self.push(Difference::new(
                    DifferenceKind::FunctionExtraDifference,
                    &path,
                    String::new(),
                    render_overloads(af),
                )),
                (None, None) => unreachable!(),
            }
        }
    }

    fn compare_class(&mut self, path: &str, e: &ClassDecl, a: &ClassDecl) {
        let ctor = |c: &ClassDecl| {
            (!c.constructors.is_empty())
                .then(|| FunctionDecl::new("constructor", c.constructors.clone()))
        };
        let (mut em, mut am) = (e.methods.clone(), a.methods.clone());
        em.extend(ctor(e));
        am.extend(ctor(a));
        self.compare_functions(path, &em, &am);
    }

    fn compare_classes(&mut self, prefix: &str, e: &[ClassDecl], a: &[ClassDecl]) {
        let names: BTreeSet<&str> = e.iter().chain(a).map(|c| c.name.as_str()).collect();
        for name in names {
            let path = join(prefix, name);
            let ec = e.iter().find(|c| c.name == name);
            let ac = a.iter().find(|c| c.name == name);
            let empty = ClassDecl::default();
            self.compare_class(&path, ec.unwrap_or(&empty), ac.unwrap_or(&empty));
        }
    }

    fn compare_scopes(&mut self, prefix: &str, e: &Scope, a: &Scope) {
        self.compare_functions(prefix, &e.functions, &a.functions);
        self.compare_classes(prefix, &e.classes, &a.classes);
        let names: BTreeSet<&String> = e.namespaces.keys().chain(a.namespaces.keys()).collect();
        let empty = Scope::default();
        for name in names {
            self.compare_scopes(
                &join(prefix, name),
                e.namespaces.get(name).unwrap_or(&empty),
                a.namespaces.get(name).unwrap_or(&empty),
            );
        }
    }
}

fn render_prop(p: &crate::types::Property) -> String {
    let opt = if p.optional { "?" } else { "" };
    match (&p.ty, p.method) {
        (TsType::Callback(sig), true) => format!("{}{opt}{sig}", p.name),
        (ty, _) => format!("{}{opt}: {ty}", p.name),
    }
}

fn join(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

/// The scope without the exported declaration and its namespace.
fn rest_of(scope: &Scope, export: &str) -> Scope {
    let mut rest = scope.clone();
    rest.functions.retain(|f| f.name != export);
    rest.classes.retain(|c| c.name != export);
    rest.namespaces.remove(export);
    rest
}

/// Compares two alias-free modules. Declaration order and union member
/// order do not matter; parameter names and return types are ignored.
pub fn compare(
    expected: &DeclarationModule,
    actual: &DeclarationModule,
    module_name: &str,
) -> Result<ComparisonReport, CompareError> {
    if has_aliases(&expected.scope) {
        return Err(CompareError::UnexpandedAliases { side: "expected" });
    }
    if has_aliases(&actual.scope) {
        return Err(CompareError::UnexpandedAliases { side: "actual" });
    }
    let expected = normalize(expected.clone());
    let actual = normalize(actual.clone());
    let mut report = ComparisonReport {
        module: module_name.to_string(),
        template: expected.template,
        differences: Vec::new(),
        tags: expected
            .feature_tags
            .union(&actual.feature_tags)
            .copied()
            .collect(),
    };
    if expected.template != actual.template {
        report.differences.push(Difference::new(
            DifferenceKind::TemplateDifference,
            "",
            expected.template.to_string(),
            actual.template.to_string(),
        ));
        return Ok(report);
    }
    let mut c = Comparer {
        expected: &expected,
        actual: &actual,
        out: Vec::new(),
        seen: BTreeSet::new(),
    };
    let ee = expected.export_assignment.clone().unwrap_or_default();
    let ae = actual.export_assignment.clone().unwrap_or_default();
    if fold_identifier(&ee) != fold_identifier(&ae) {
        c.push(Difference::new(
            DifferenceKind::ExportAssignmentDifference,
            "export =",
            ee.clone(),
            ae.clone(),
        ));
    }
    let path = if ae.is_empty() { ee.clone() } else { ae.clone() };
    let empty = Scope::default();
    match expected.template {
        TemplateKind::ModuleFunction => {
            match (expected.scope.function(&ee), actual.scope.function(&ae)) {
                (Some(ef), Some(af)) => c.compare_function(&path, ef, af),
                (ef, af) => {
                    let f = |x: Option<&FunctionDecl>| x.map(render_overloads).unwrap_or_default();
                    c.push(Difference::new(DifferenceKind::FunctionMissingDifference, &path, f(ef), f(af)));
                }
            }
        }
        TemplateKind::ModuleClass => {
            let none = ClassDecl::default();
            c.compare_class(
                &path,
                expected.scope.class(&ee).unwrap_or(&none),
                actual.scope.class(&ae).unwrap_or(&none),
            );
        }
        TemplateKind::Module => {}
    }
    if expected.template == TemplateKind::Module {
        c.compare_scopes("", &expected.scope, &actual.scope);
    } else {
        c.compare_scopes(
            &path,
            expected.scope.namespaces.get(&ee).unwrap_or(&empty),
            actual.scope.namespaces.get(&ae).unwrap_or(&empty),
        );
        c.compare_scopes("", &rest_of(&expected.scope, &ee), &rest_of(&actual.scope, &ae));
    }
    report.differences = c.out;
    Ok(report)
}

/// A comparison of two source files, or the reason it was not made.
#[derive(Debug)]
pub struct SourceComparison {
    pub report: ComparisonReport,
    pub expected: DeclarationModule,
    pub actual: DeclarationModule,
}

/// Parses both files, leaves out reference files that use features the
/// generator never produces (unless `filter` is false), expands aliases
/// and compares.
pub fn compare_sources(
    expected_src: &str,
    actual_src: &str,
    module_name: &str,
    filter: bool,
) -> Result<SourceComparison, CompareError> {
    let expected = parse_module(expected_src, module_name).map_err(|source| CompareError::Parse {
        side: "expected",
        source,
    })?;
    let actual = parse_module(actual_src, module_name).map_err(|source| CompareError::Parse {
        side: "actual",
        source,
    })?;
    let tags: BTreeSet<FeatureTag> = expected.feature_tags.union(&actual.feature_tags).copied().collect();
    if filter {
        let bad: BTreeSet<FeatureTag> = expected
            .feature_tags
            .iter()
            .copied()
            .filter(|t| t.is_unimplemented())
            .collect();
        if !bad.is_empty() {
            return Err(CompareError::Filtered(bad));
        }
    }
    let expand = |m: DeclarationModule, side| {
        expand_aliases(m).map_err(|source| CompareError::Parse { side, source })
    };
    let expected = normalize(expand(expected, "expected")?);
    let actual = normalize(expand(actual, "actual")?);
    let mut report = compare(&expected, &actual, module_name)?;
    report.tags = tags;
    Ok(SourceComparison {
        report,
        expected,
        actual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::Property;

    fn run(e: &str, a: &str) -> ComparisonReport {
        compare_sources(e, a, "m", false).unwrap().report
    }

    #[test]
    fn identical_files_have_no_differences() {
        let src = "export function f(a: string): void;";
        let r = run(src, src);
        assert_eq!(
            r.to_json(),
            "{\n    \"module\": \"m\",\n    \"template\": \"module\",\n    \"differences\": [],\n    \"tags\": [\n        \"type-string\",\n        \"type-void\"\n    ]\n}\n"
        );
    }

    #[test]
    fn abs_optional_parameter_is_solvable() {
        let r = run(
            "declare function abs(input?: string): string;\nexport = abs;",
            "export = Abs;\n\ndeclare function Abs(input: string): string;",
        );
        assert_eq!(r.differences.len(), 1, "{:?}", r.differences);
        let d = &r.differences[0];
        assert_eq!(d.kind, DifferenceKind::ParameterTypeDifference);
        assert_eq!(d.solvability, Solvability::Solvable);
        assert_eq!(d.path, "Abs.input");
    }

    #[test]
    fn templates_stop_the_comparison() {
        let r = run(
            "export function smartTruncate(string: string, length: number): string;",
            "export = SmartTruncate;\ndeclare function SmartTruncate(string: string, length: number): string;",
        );
        assert_eq!(r.differences.len(), 1);
        assert_eq!(r.differences[0].kind, DifferenceKind::TemplateDifference);
        assert_eq!(r.template, TemplateKind::Module);
    }

    #[test]
    fn export_names_fold_case_and_separators() {
        let r = run(
            "export = dirnameRegex;\ndeclare function dirnameRegex(): RegExp;",
            "export = DirnameRegex;\ndeclare function DirnameRegex(): RegExp;",
        );
        assert!(r.differences.is_empty());
        let r = run(
            "export = foo;\ndeclare function foo(): RegExp;",
            "export = Bar;\ndeclare function Bar(): RegExp;",
        );
        assert_eq!(r.count(DifferenceKind::ExportAssignmentDifference), 1);
    }

    #[test]
    fn interface_properties_are_matched_by_name() {
        let r = run(
            "declare function g(o: g.Opts): void;\ndeclare namespace g { interface Opts { a: string; b?: number; c: boolean } }\nexport = g;",
            "export = G;\ndeclare function G(opts: G.I__opts): void;\ndeclare namespace G { export interface I__opts { 'a'?: string; 'b'?: number; 'd'?: string; } }",
        );
        let kinds: Vec<(DifferenceKind, &str)> =
            r.differences.iter().map(|d| (d.kind, d.path.as_str())).collect();
        assert_eq!(
            kinds,
            [
                (DifferenceKind::ParameterTypeDifference, "G.I__opts.a"),
                (DifferenceKind::ParameterMissingDifference, "G.I__opts.c"),
                (DifferenceKind::ParameterExtraDifference, "G.I__opts.d"),
            ]
        );
        assert_eq!(r.differences[0].solvability, Solvability::Unsolvable);
    }

    #[test]
    fn literal_and_named_object_types_compare_alike() {
        let r = run(
            "declare function gh(url: string | {url: string}, options?: gh.Options): gh.Result | null;\n\
             declare namespace gh { interface Options { enterprise?: boolean; } interface Result { user: string } }\nexport = gh;",
            "export = GithubUrlToObject;\ndeclare function GithubUrlToObject(repoUrl: string | GithubUrlToObject.I__repoUrl, opts?: GithubUrlToObject.I__opts): object | null;\n\
             declare namespace GithubUrlToObject { export interface I__repoUrl { 'url'?: string; } export interface I__opts { 'enterprise'?: boolean; } }",
        );
        let kinds: Vec<(DifferenceKind, &str, Solvability)> = r
            .differences
            .iter()
            .map(|d| (d.kind, d.path.as_str(), d.solvability))
            .collect();
        assert_eq!(
            kinds,
            [
                (DifferenceKind::ExportAssignmentDifference, "export =", Solvability::NotApplicable),
                (
                    DifferenceKind::ParameterTypeDifference,
                    "GithubUrlToObject.I__repoUrl.url",
                    Solvability::Unsolvable
                )
            ]
        );
    }

    #[test]
    fn overload_counts_and_missing_functions() {
        let r = run(
            "export function f(a: string): void;\nexport function f(a: number): void;\nexport function h(): void;",
            "export function f(a: string | number): void;\nexport function k(): void;",
        );
        let kinds: Vec<DifferenceKind> = r.differences.iter().map(|d| d.kind).collect();
        assert_eq!(
            kinds,
            [
                DifferenceKind::FunctionOverloadingDifference,
                DifferenceKind::FunctionMissingDifference,
                DifferenceKind::FunctionExtraDifference,
            ]
        );
        assert!(r
            .differences
            .iter()
            .all(|d| d.solvability == Solvability::NotApplicable));
    }

    #[test]
    fn undefined_unions_count_as_optional() {
        let r = run(
            "export function f(a?: string, b: number): void;",
            "export function f(a: string | undefined, b: number): void;",
        );
        assert!(r.differences.is_empty(), "{:?}", r.differences);
    }

    #[test]
    fn parameter_counts() {
        let r = run("export function f(a: string, b: number): void;", "export function f(x: string, y: number, z: boolean): void;");
        assert_eq!(r.differences.len(), 1);
        assert_eq!(r.differences[0].kind, DifferenceKind::ParameterExtraDifference);
        let r = run("export function f(a: string, b: number): void;", "export function f(x: string): void;");
        assert_eq!(r.differences[0].kind, DifferenceKind::ParameterMissingDifference);
    }

    #[test]
    fn solvability_rules() {
        use TsType::*;
        let s = |e: TsType, eo, a: TsType, ao| classify_type_difference((&e, eo), (&a, ao));
        assert_eq!(s(TsType::union([String, Number]), false, String, false), Solvability::Solvable);
        assert_eq!(s(String, true, String, false), Solvability::Solvable);
        assert_eq!(s(Number, false, String, false), Solvability::Unsolvable);
        assert_eq!(s(String, false, String, true), Solvability::Unsolvable);
        let shape = |props: Vec<Property>| Shape(ObjectShape { properties: props, ..Default::default() });
        assert_eq!(
            s(
                shape(vec![Property::new("a", String), Property::new("b", Number)]),
                false,
                shape(vec![Property::new("a", String)]),
                false
            ),
            Solvability::Solvable
        );
        assert_eq!(s(shape(vec![Property::new("a", String)]), false, PlainObject, false), Solvability::Solvable);
    }

    #[test]
    fn aliases_must_be_expanded() {
        let m = parse_module("type T = string; export function f(a: T): void;", "m").unwrap();
        assert_eq!(
            compare(&m, &m, "m"),
            Err(CompareError::UnexpandedAliases { side: "expected" })
        );
    }

    #[test]
    fn unimplemented_features_are_filtered() {
        let err = compare_sources("export function f(a: any): void;", "export function f(a: string): void;", "m", true)
            .unwrap_err();
        assert_eq!(err, CompareError::Filtered([FeatureTag::TypeAny].into()));
    }
}
