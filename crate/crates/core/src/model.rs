//! The declaration AST shared by the emitter, the parser and the
//! comparator.
//!
//! Declarations are stored by kind, like a symbol table: functions (with
//! their overloads), classes, interfaces, type aliases, variables and
//! nested namespaces. [`normalize`] puts a module in a canonical order so
//! that two files describing the same structure compare equal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::types::{is_false, ObjectShape, Property, Signature, TsType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TemplateKind {
    Module,
    ModuleClass,
    ModuleFunction,
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TemplateKind::Module => "module",
            TemplateKind::ModuleClass => "module-class",
            TemplateKind::ModuleFunction => "module-function",
        })
    }
}

/// TypeScript features a declaration file may use. The names match the
/// usual DefinitelyTyped feature survey; `unsupported-syntax` marks
/// constructs the parser skipped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeatureTag {
    TypeString,
    OptionalParameter,
    TypeBoolean,
    TypeNumber,
    TypeVoid,
    TypeUnion,
    TypeFunction,
    TypeArray,
    TypeAny,
    TypeLiterals,
    AliasType,
    IndexSignature,
    GenericsFunction,
    DotDotDotToken,
    CallSignature,
    GenericsInterface,
    TypeObject,
    TypeUndefined,
    TypeIntersection,
    Readonly,
    TypeTuple,
    GenericsClass,
    Static,
    Private,
    Public,
    Protected,
    UnsupportedSyntax,
}

impl FeatureTag {
    pub const ALL: [FeatureTag; 27] = [
        FeatureTag::TypeString,
        FeatureTag::OptionalParameter,
        FeatureTag::TypeBoolean,
        FeatureTag::TypeNumber,
        FeatureTag::TypeVoid,
        FeatureTag::TypeUnion,
        FeatureTag::TypeFunction,
        FeatureTag::TypeArray,
        FeatureTag::TypeAny,
        FeatureTag::TypeLiterals,
        FeatureTag::AliasType,
        FeatureTag::IndexSignature,
        FeatureTag::GenericsFunction,
        FeatureTag::DotDotDotToken,
        FeatureTag::CallSignature,
        FeatureTag::GenericsInterface,
        FeatureTag::TypeObject,
        FeatureTag::TypeUndefined,
        FeatureTag::TypeIntersection,
        FeatureTag::Readonly,
        FeatureTag::TypeTuple,
        FeatureTag::GenericsClass,
        FeatureTag::Static,
        FeatureTag::Private,
        FeatureTag::Public,
        FeatureTag::Protected,
        FeatureTag::UnsupportedSyntax,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureTag::TypeString => "type-string",
            FeatureTag::OptionalParameter => "optional-parameter",
            FeatureTag::TypeBoolean => "type-boolean",
            FeatureTag::TypeNumber => "type-number",
            FeatureTag::TypeVoid => "type-void",
            FeatureTag::TypeUnion => "type-union",
            FeatureTag::TypeFunction => "type-function",
            FeatureTag::TypeArray => "type-array",
            FeatureTag::TypeAny => "type-any",
            FeatureTag::TypeLiterals => "type-literals",
            FeatureTag::AliasType => "alias-type",
            FeatureTag::IndexSignature => "index-signature",
            FeatureTag::GenericsFunction => "generics-function",
            FeatureTag::DotDotDotToken => "dot-dot-dot-token",
            FeatureTag::CallSignature => "call-signature",
            FeatureTag::GenericsInterface => "generics-interface",
            FeatureTag::TypeObject => "type-object",
            FeatureTag::TypeUndefined => "type-undefined",
            FeatureTag::TypeIntersection => "type-intersection",
            FeatureTag::Readonly => "readonly",
            FeatureTag::TypeTuple => "type-tuple",
            FeatureTag::GenericsClass => "generics-class",
            FeatureTag::Static => "static",
            FeatureTag::Private => "private",
            FeatureTag::Public => "public",
            FeatureTag::Protected => "protected",
            FeatureTag::UnsupportedSyntax => "unsupported-syntax",
        }
    }

    /// Features the generator never produces. A reference file using any
    /// of them is left out of comparison.
    pub fn is_unimplemented(self) -> bool {
        matches!(
            self,
            FeatureTag::TypeAny
                | FeatureTag::TypeLiterals
                | FeatureTag::IndexSignature
                | FeatureTag::GenericsFunction
                | FeatureTag::GenericsInterface
                | FeatureTag::GenericsClass
                | FeatureTag::TypeTuple
                | FeatureTag::TypeIntersection
                | FeatureTag::DotDotDotToken
                | FeatureTag::CallSignature
                | FeatureTag::Readonly
                | FeatureTag::Static
                | FeatureTag::Private
                | FeatureTag::Public
                | FeatureTag::Protected
                | FeatureTag::UnsupportedSyntax
        )
    }
}

impl fmt::Display for FeatureTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Visibility {
    #[default]
    Unspecified,
    Public,
    Private,
    Protected,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Modifiers {
    #[serde(default, skip_serializing_if = "is_false")]
    pub is_static: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub readonly: bool,
    #[serde(default, skip_serializing_if = "is_unspecified")]
    pub visibility: Visibility,
}

fn is_unspecified(v: &Visibility) -> bool {
    *v == Visibility::Unspecified
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FunctionDecl {
    pub name: String,
    pub overloads: Vec<Signature>,
    #[serde(default)]
    pub modifiers: Modifiers,
}

impl FunctionDecl {
    pub fn new(name: impl Into<String>, overloads: Vec<Signature>) -> Self {
        FunctionDecl {
            name: name.into(),
            overloads,
            modifiers: Modifiers::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassProperty {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TsType,
    #[serde(default, skip_serializing_if = "is_false")]
    pub optional: bool,
    #[serde(default)]
    pub modifiers: Modifiers,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub type_params: Vec<String>,
    pub constructors: Vec<Signature>,
    pub methods: Vec<FunctionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<ClassProperty>,
}

impl ClassDecl {
    pub fn method(&self, name: &str) -> Option<&FunctionDecl> {
        self.methods.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InterfaceDecl {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub type_params: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extends: Vec<TsType>,
    pub shape: ObjectShape,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TypeAlias {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub type_params: Vec<String>,
    #[serde(rename = "type")]
    pub ty: TsType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VariableDecl {
    pub name: String,
    #[serde(rename = "type", default, skip_serializing_if = "Option::is_none")]
    pub ty: Option<TsType>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub is_const: bool,
}

/// One level of declarations: the file root or a namespace body.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Scope {
    #[serde(default)]
    pub functions: Vec<FunctionDecl>,
    #[serde(default)]
    pub classes: Vec<ClassDecl>,
    #[serde(default)]
    pub interfaces: Vec<InterfaceDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<TypeAlias>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub variables: Vec<VariableDecl>,
    #[serde(default)]
    pub namespaces: BTreeMap<String, Scope>,
}

impl Scope {
    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }

    pub fn class(&self, name: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn interface(&self, name: &str) -> Option<&InterfaceDecl> {
        self.interfaces.iter().find(|i| i.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
            && self.classes.is_empty()
            && self.interfaces.is_empty()
            && self.aliases.is_empty()
            && self.variables.is_empty()
            && self.namespaces.is_empty()
    }

    /// Visits every type written anywhere in this scope, with the kind of
    /// declaration it appears in.
    pub fn walk_types<'a>(&'a self, f: &mut dyn FnMut(Context, &'a TsType)) {
        for func in &self.functions {
            for sig in &func.overloads {
                sig.walk_types(&mut |t| f(Context::Function, t));
            }
        }
        for class in &self.classes {
            for sig in &class.constructors {
                sig.walk_types(&mut |t| f(Context::Class, t));
            }
            for m in &class.methods {
                for sig in &m.overloads {
                    sig.walk_types(&mut |t| f(Context::Class, t));
                }
            }
            for p in &class.properties {
                p.ty.walk(&mut |t| f(Context::Class, t));
            }
        }
        for i in &self.interfaces {
            for e in &i.extends {
                e.walk(&mut |t| f(Context::Interface, t));
            }
            i.shape.walk_types(&mut |t| f(Context::Interface, t));
        }
        for a in &self.aliases {
            a.ty.walk(&mut |t| f(Context::Alias, t));
        }
        for v in &self.variables {
            if let Some(ty) = &v.ty {
                ty.walk(&mut |t| f(Context::Variable, t));
            }
        }
        for ns in self.namespaces.values() {
            ns.walk_types(f);
        }
    }

    /// Rewrites every type in this scope through `f` (bottom-up per type).
    pub fn map_types(&mut self, f: &mut dyn FnMut(TsType) -> TsType) {
        let map_sig = |s: &mut Signature, f: &mut dyn FnMut(TsType) -> TsType| {
            *s = std::mem::take(s).map_types(f);
        };
        for func in &mut self.functions {
            for sig in &mut func.overloads {
                map_sig(sig, f);
            }
        }
        for class in &mut self.classes {
            for sig in &mut class.constructors {
                map_sig(sig, f);
            }
            for m in &mut class.methods {
                for sig in &mut m.overloads {
                    map_sig(sig, f);
                }
            }
            for p in &mut class.properties {
                p.ty = std::mem::replace(&mut p.ty, TsType::Never).map(f);
            }
        }
        for i in &mut self.interfaces {
            i.extends = std::mem::take(&mut i.extends)
                .into_iter()
                .map(|t| t.map(f))
                .collect();
            i.shape = std::mem::take(&mut i.shape).map_types(f);
        }
        for a in &mut self.aliases {
            a.ty = std::mem::replace(&mut a.ty, TsType::Never).map(f);
        }
        for v in &mut self.variables {
            v.ty = v.ty.take().map(|t| t.map(f));
        }
        for ns in self.namespaces.values_mut() {
            ns.map_types(f);
        }
    }
}

/// The kind of declaration a type occurs in, used to pick the generics tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Context {
    Function,
    Class,
    Interface,
    Alias,
    Variable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DeclarationModule {
    pub module_name: String,
    pub template: TemplateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub export_assignment: Option<String>,
    #[serde(flatten)]
    pub scope: Scope,
    #[serde(default)]
    pub feature_tags: BTreeSet<FeatureTag>,
    /// Source snippets the parser skipped.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unsupported: Vec<String>,
}

impl DeclarationModule {
    pub fn new(module_name: impl Into<String>, template: TemplateKind) -> Self {
        DeclarationModule {
            module_name: module_name.into(),
            template,
            export_assignment: None,
            scope: Scope::default(),
            feature_tags: BTreeSet::new(),
            unsupported: Vec::new(),
        }
    }

    /// The namespace merged with the export assignment, if any.
    pub fn export_namespace(&self) -> Option<&Scope> {
        self.export_assignment
            .as_ref()
            .and_then(|name| self.scope.namespaces.get(name))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("declaration AST is always serializable")
    }
}

/// Every feature used by the module, computed from the AST alone.
pub fn tag_features(module: &DeclarationModule) -> BTreeSet<FeatureTag> {
    let mut tags = BTreeSet::new();
    if !module.unsupported.is_empty() {
        tags.insert(FeatureTag::UnsupportedSyntax);
    }
    tag_scope(&module.scope, &mut tags);
    tags
}

fn generics_tag(ctx: Context) -> FeatureTag {
    match ctx {
        Context::Class => FeatureTag::GenericsClass,
        Context::Interface => FeatureTag::GenericsInterface,
        Context::Function | Context::Alias | Context::Variable => FeatureTag::GenericsFunction,
    }
}

fn tag_modifiers(m: &Modifiers, tags: &mut BTreeSet<FeatureTag>) {
    if m.is_static {
        tags.insert(FeatureTag::Static);
    }
    if m.readonly {
        tags.insert(FeatureTag::Readonly);
    }
    match m.visibility {
        Visibility::Unspecified => {}
        Visibility::Public => {
            tags.insert(FeatureTag::Public);
        }
        Visibility::Private => {
            tags.insert(FeatureTag::Private);
        }
        Visibility::Protected => {
            tags.insert(FeatureTag::Protected);
        }
    }
}

fn tag_signature(sig: &Signature, tags: &mut BTreeSet<FeatureTag>) {
    for p in &sig.params {
        if p.optional {
            tags.insert(FeatureTag::OptionalParameter);
        }
        if p.rest {
            tags.insert(FeatureTag::DotDotDotToken);
        }
    }
}

fn tag_shape(shape: &ObjectShape, tags: &mut BTreeSet<FeatureTag>) {
    for Property {
        optional, readonly, ..
    } in &shape.properties
    {
        if *optional {
            tags.insert(FeatureTag::OptionalParameter);
        }
        if *readonly {
            tags.insert(FeatureTag::Readonly);
        }
    }
    if !shape.call_signatures.is_empty() || !shape.construct_signatures.is_empty() {
        tags.insert(FeatureTag::CallSignature);
    }
    for s in shape.call_signatures.iter().chain(&shape.construct_signatures) {
        tag_signature(s, tags);
    }
    for ix in &shape.index_signatures {
        tags.insert(FeatureTag::IndexSignature);
        if ix.readonly {
            tags.insert(FeatureTag::Readonly);
        }
    }
}

fn tag_scope(scope: &Scope, tags: &mut BTreeSet<FeatureTag>) {
    scope.walk_types(&mut |ctx, t| {
        let tag = match t {
            TsType::String => FeatureTag::TypeString,
            TsType::Number => FeatureTag::TypeNumber,
            TsType::Boolean => FeatureTag::TypeBoolean,
            TsType::Void => FeatureTag::TypeVoid,
            TsType::Undefined => FeatureTag::TypeUndefined,
            TsType::Any => FeatureTag::TypeAny,
            TsType::PlainObject => FeatureTag::TypeObject,
            TsType::Array(_) => FeatureTag::TypeArray,
            TsType::Union(_) => FeatureTag::TypeUnion,
            TsType::Intersection(_) => FeatureTag::TypeIntersection,
            TsType::Tuple(_) => FeatureTag::TypeTuple,
            TsType::Literal(_) => FeatureTag::TypeLiterals,
            TsType::Opaque(_) => FeatureTag::UnsupportedSyntax,
            TsType::Callback(sig) => {
                if !sig.type_params.is_empty() {
                    tags.insert(FeatureTag::GenericsFunction);
                }
                tag_signature(sig, tags);
                FeatureTag::TypeFunction
            }
            TsType::Shape(shape) => {
                tag_shape(shape, tags);
                return;
            }
            TsType::Generic { name, .. } => {
                if name == "Array" || name == "ReadonlyArray" {
                    tags.insert(FeatureTag::TypeArray);
                }
                if name == "ReadonlyArray" {
                    tags.insert(FeatureTag::Readonly);
                }
                generics_tag(ctx)
            }
            TsType::Null
            | TsType::Unknown
            | TsType::Never
            | TsType::Named(_)
            | TsType::InterfaceRef(_) => return,
        };
        tags.insert(tag);
    });

    for func in &scope.functions {
        tag_modifiers(&func.modifiers, tags);
        for sig in &func.overloads {
            if !sig.type_params.is_empty() {
                tags.insert(FeatureTag::GenericsFunction);
            }
            tag_signature(sig, tags);
        }
    }
    for class in &scope.classes {
        if !class.type_params.is_empty() {
            tags.insert(FeatureTag::GenericsClass);
        }
        for sig in &class.constructors {
            tag_signature(sig, tags);
        }
        for m in &class.methods {
            tag_modifiers(&m.modifiers, tags);
            for sig in &m.overloads {
                if !sig.type_params.is_empty() {
                    tags.insert(FeatureTag::GenericsFunction);
                }
                tag_signature(sig, tags);
            }
        }
        for p in &class.properties {
            tag_modifiers(&p.modifiers, tags);
            if p.optional {
                tags.insert(FeatureTag::OptionalParameter);
            }
        }
    }
    for i in &scope.interfaces {
        if !i.type_params.is_empty() {
            tags.insert(FeatureTag::GenericsInterface);
        }
        tag_shape(&i.shape, tags);
    }
    for a in &scope.aliases {
        tags.insert(FeatureTag::AliasType);
        if !a.type_params.is_empty() {
            tags.insert(FeatureTag::GenericsFunction);
        }
    }
    for ns in scope.namespaces.values() {
        tag_scope(ns, tags);
    }
}

fn normalize_scope(scope: &mut Scope) {
    scope.map_types(&mut |t| match t {
        TsType::Shape(mut shape) => {
            shape.sort_members();
            TsType::Shape(shape)
        }
        TsType::Intersection(mut ms) => {
            ms.sort_by(crate::types::canonical_cmp);
            ms.dedup();
            TsType::Intersection(ms)
        }
        other => other,
    });
    for f in &mut scope.functions {
        f.overloads.sort_by_cached_key(Signature::shape_key);
    }
    scope.functions.sort_by(|a, b| a.name.cmp(&b.name));
    for c in &mut scope.classes {
        c.constructors.sort_by_cached_key(Signature::shape_key);
        for m in &mut c.methods {
            m.overloads.sort_by_cached_key(Signature::shape_key);
        }
        c.methods.sort_by(|a, b| a.name.cmp(&b.name));
        c.properties.sort_by(|a, b| a.name.cmp(&b.name));
    }
    scope.classes.sort_by(|a, b| a.name.cmp(&b.name));
    for i in &mut scope.interfaces {
        i.shape.sort_members();
    }
    scope.interfaces.sort_by(|a, b| a.name.cmp(&b.name));
    scope.aliases.sort_by(|a, b| a.name.cmp(&b.name));
    scope.variables.sort_by(|a, b| a.name.cmp(&b.name));
    for ns in scope.namespaces.values_mut() {
        normalize_scope(ns);
    }
    scope.namespaces.retain(|_, ns| !ns.is_empty());
}

/// Canonical form: declarations sorted by name, overloads by signature,
/// object members by name, unions in canonical member order, and feature
/// tags recomputed.
pub fn normalize(mut module: DeclarationModule) -> DeclarationModule {
    normalize_scope(&mut module.scope);
    module.unsupported.sort();
    module.feature_tags = tag_features(&module);
    module
}
