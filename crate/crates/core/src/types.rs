//! The type language shared by inference, the declaration model, the
//! parser and the comparator.
//!
//! Inference only ever produces the generated subset (primitives, `void`,
//! `null`, named built-ins, interface references, arrays, callbacks,
//! `object` and unions of those). The remaining variants exist so the
//! parser can represent, and tag, everything else a declaration file may
//! contain.

use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "of", rename_all = "camelCase")]
pub enum TsType {
    String,
    Number,
    Boolean,
    Void,
    Null,
    Undefined,
    Any,
    Unknown,
    Never,
    /// The `object` keyword.
    PlainObject,
    /// A reference that does not resolve to an interface of the file,
    /// e.g. `RegExp` or a class name.
    Named(String),
    /// A reference to an interface declared in the file, fully qualified
    /// (`GlobToRegexp.I__opts`).
    InterfaceRef(String),
    Array(Box<TsType>),
    Callback(Box<Signature>),
    /// An anonymous structural object type (`{ a: string }`).
    Shape(ObjectShape),
    Literal(Literal),
    Tuple(Vec<TsType>),
    Union(Vec<TsType>),
    Intersection(Vec<TsType>),
    Generic { name: String, args: Vec<TsType> },
    /// Syntax the model does not represent (`typeof x`, `keyof T`, mapped
    /// or conditional types, ...). Kept verbatim for diagnostics.
    Opaque(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "camelCase")]
pub enum Literal {
    String(String),
    Number(String),
    Boolean(bool),
}

/// A function signature. `ret` is absent for constructors and for
/// declarations written without a return type annotation.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Signature {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub type_params: Vec<String>,
    pub params: Vec<Param>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ret: Option<TsType>,
}

/// A formal parameter. The name is carried for printing but never takes
/// part in equality.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Param {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TsType,
    #[serde(default, skip_serializing_if = "is_false")]
    pub optional: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub rest: bool,
}

impl PartialEq for Param {
    fn eq(&self, other: &Self) -> bool {
        self.ty == other.ty && self.optional == other.optional && self.rest == other.rest
    }
}

impl Eq for Param {}

impl Param {
    pub fn new(name: impl Into<String>, ty: TsType) -> Self {
        Param {
            name: name.into(),
            ty,
            optional: false,
            rest: false,
        }
    }

    pub fn optional(name: impl Into<String>, ty: TsType) -> Self {
        Param {
            optional: true,
            ..Param::new(name, ty)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ObjectShape {
    pub properties: Vec<Property>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub call_signatures: Vec<Signature>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub construct_signatures: Vec<Signature>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub index_signatures: Vec<IndexSignature>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Property {
    pub name: String,
    #[serde(rename = "type")]
    pub ty: TsType,
    #[serde(default, skip_serializing_if = "is_false")]
    pub optional: bool,
    #[serde(default, skip_serializing_if = "is_false")]
    pub readonly: bool,
    /// Declared with method syntax (`name(): T`); `ty` is then a callback.
    #[serde(default, skip_serializing_if = "is_false")]
    pub method: bool,
}

impl Property {
    pub fn new(name: impl Into<String>, ty: TsType) -> Self {
        Property {
            name: name.into(),
            ty,
            optional: false,
            readonly: false,
            method: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct IndexSignature {
    pub key_name: String,
    pub key_type: TsType,
    pub value: TsType,
    #[serde(default, skip_serializing_if = "is_false")]
    pub readonly: bool,
}

pub(crate) fn is_false(b: &bool) -> bool {
    !*b
}

impl ObjectShape {
    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.properties.is_empty()
            && self.call_signatures.is_empty()
            && self.construct_signatures.is_empty()
            && self.index_signatures.is_empty()
    }
}

impl TsType {
    /// Builds a canonical union: nested unions are flattened, duplicates
    /// removed and members sorted. Zero members yield `never`, one member
    /// is returned as is.
    pub fn union<I: IntoIterator<Item = TsType>>(members: I) -> TsType {
        let mut flat = Vec::new();
        for m in members {
            flatten_into(m, &mut flat);
        }
        let mut out: Vec<TsType> = Vec::with_capacity(flat.len());
        for m in flat {
            if !out.contains(&m) {
                out.push(m);
            }
        }
        out.sort_by(canonical_cmp);
        match out.len() {
            0 => TsType::Never,
            1 => out.pop().unwrap(),
            _ => TsType::Union(out),
        }
    }

    /// Union members, or the type itself as a single member.
    pub fn members(&self) -> Vec<&TsType> {
        match self {
            TsType::Union(ms) => ms.iter().collect(),
            other => vec![other],
        }
    }

    pub fn contains_member(&self, needle: &TsType) -> bool {
        self.members().into_iter().any(|m| m == needle)
    }

    /// The type with every `undefined` member removed, or `None` when
    /// nothing else is left.
    pub fn without_undefined(&self) -> Option<TsType> {
        let rest: Vec<TsType> = self
            .members()
            .into_iter()
            .filter(|m| **m != TsType::Undefined)
            .cloned()
            .collect();
        if rest.is_empty() {
            None
        } else {
            Some(TsType::union(rest))
        }
    }

    pub fn is_primitive(&self) -> bool {
        matches!(self, TsType::String | TsType::Number | TsType::Boolean)
    }

    /// Visits this type and every type nested inside it.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a TsType)) {
        f(self);
        match self {
            TsType::Array(e) => e.walk(f),
            TsType::Callback(sig) => sig.walk_types(f),
            TsType::Shape(shape) => shape.walk_types(f),
            TsType::Tuple(ms) | TsType::Union(ms) | TsType::Intersection(ms) => {
                ms.iter().for_each(|m| m.walk(f))
            }
            TsType::Generic { args, .. } => args.iter().for_each(|m| m.walk(f)),
            _ => {}
        }
    }

    /// Rebuilds this type bottom-up through `f`.
    pub fn map(self, f: &mut dyn FnMut(TsType) -> TsType) -> TsType {
        let mapped = match self {
            TsType::Array(e) => TsType::Array(Box::new(e.map(f))),
            TsType::Callback(sig) => TsType::Callback(Box::new(sig.map_types(f))),
            TsType::Shape(shape) => TsType::Shape(shape.map_types(f)),
            TsType::Tuple(ms) => TsType::Tuple(ms.into_iter().map(|m| m.map(f)).collect()),
            TsType::Union(ms) => TsType::union(ms.into_iter().map(|m| m.map(f))),
            TsType::Intersection(ms) => {
                TsType::Intersection(ms.into_iter().map(|m| m.map(f)).collect())
            }
            TsType::Generic { name, args } => TsType::Generic {
                name,
                args: args.into_iter().map(|m| m.map(f)).collect(),
            },
            other => other,
        };
        f(mapped)
    }

    /// Re-sorts every union and shape so that structurally equal types
    /// compare equal.
    pub fn canonicalize(self) -> TsType {
        self.map(&mut |t| match t {
            TsType::Shape(mut shape) => {
                shape.sort_members();
                TsType::Shape(shape)
            }
            TsType::Intersection(mut ms) => {
                ms.sort_by(canonical_cmp);
                ms.dedup();
                TsType::Intersection(ms)
            }
            other => other,
        })
    }

    fn rank(&self) -> u8 {
        match self {
            TsType::String => 0,
            TsType::Number => 1,
            TsType::Boolean => 2,
            TsType::Literal(_) => 3,
            TsType::Any => 4,
            TsType::Unknown => 5,
            TsType::Never => 6,
            TsType::Void => 7,
            TsType::Named(_) => 10,
            TsType::Generic { .. } => 11,
            TsType::InterfaceRef(_) => 20,
            TsType::Callback(_) => 30,
            TsType::Array(_) => 40,
            TsType::Tuple(_) => 41,
            TsType::Shape(_) => 50,
            TsType::PlainObject => 51,
            TsType::Intersection(_) => 55,
            TsType::Opaque(_) => 58,
            TsType::Union(_) => 59,
            TsType::Null => 60,
            TsType::Undefined => 70,
        }
    }
}

fn flatten_into(t: TsType, out: &mut Vec<TsType>) {
    match t {
        TsType::Union(ms) => ms.into_iter().for_each(|m| flatten_into(m, out)),
        TsType::Never => {}
        other => out.push(other),
    }
}

/// The fixed member order used inside unions: primitives, built-ins,
/// interface references, callbacks, arrays, object, `null`, `undefined`.
/// Ties are broken by the rendered text.
pub fn canonical_cmp(a: &TsType, b: &TsType) -> Ordering {
    if a == b {
        return Ordering::Equal;
    }
    a.rank()
        .cmp(&b.rank())
        .then_with(|| a.to_string().cmp(&b.to_string()))
}

impl Signature {
    pub fn walk_types<'a>(&'a self, f: &mut dyn FnMut(&'a TsType)) {
        for p in &self.params {
            p.ty.walk(f);
        }
        if let Some(r) = &self.ret {
            r.walk(f);
        }
    }

    pub fn map_types(self, f: &mut dyn FnMut(TsType) -> TsType) -> Signature {
        Signature {
            type_params: self.type_params,
            params: self
                .params
                .into_iter()
                .map(|p| Param {
                    ty: p.ty.map(f),
                    ..p
                })
                .collect(),
            ret: self.ret.map(|r| r.map(f)),
        }
    }

    /// Rendering without parameter names, used as a sort key.
    pub fn shape_key(&self) -> String {
        let mut s = String::new();
        if !self.type_params.is_empty() {
            let _ = write!(s, "<{}>", self.type_params.join(", "));
        }
        s.push('(');
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                s.push_str(", ");
            }
            if p.rest {
                s.push_str("...");
            }
            if p.optional {
                s.push('?');
            }
            let _ = write!(s, "{}", p.ty);
        }
        s.push(')');
        if let Some(r) = &self.ret {
            let _ = write!(s, ": {r}");
        }
        s
    }

    pub fn required_arity(&self) -> usize {
        self.params.iter().filter(|p| !p.optional && !p.rest).count()
    }
}

impl ObjectShape {
    pub fn walk_types<'a>(&'a self, f: &mut dyn FnMut(&'a TsType)) {
        for p in &self.properties {
            p.ty.walk(f);
        }
        for s in self.call_signatures.iter().chain(&self.construct_signatures) {
            s.walk_types(f);
        }
        for ix in &self.index_signatures {
            ix.key_type.walk(f);
            ix.value.walk(f);
        }
    }

    pub fn map_types(self, f: &mut dyn FnMut(TsType) -> TsType) -> ObjectShape {
        ObjectShape {
            properties: self
                .properties
                .into_iter()
                .map(|p| Property {
                    ty: p.ty.map(f),
                    ..p
                })
                .collect(),
            call_signatures: self
                .call_signatures
                .into_iter()
                .map(|s| s.map_types(f))
                .collect(),
            construct_signatures: self
                .construct_signatures
                .into_iter()
                .map(|s| s.map_types(f))
                .collect(),
            index_signatures: self
                .index_signatures
                .into_iter()
                .map(|ix| IndexSignature {
                    key_type: ix.key_type.map(f),
                    value: ix.value.map(f),
                    ..ix
                })
                .collect(),
        }
    }

    pub fn sort_members(&mut self) {
        self.properties.sort_by(|a, b| a.name.cmp(&b.name));
        self.call_signatures.sort_by_key(Signature::shape_key);
        self.construct_signatures.sort_by_key(Signature::shape_key);
        self.index_signatures
            .sort_by_key(|ix| format!("{}:{}", ix.key_type, ix.value));
    }
}

pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

fn write_property_name(f: &mut fmt::Formatter<'_>, name: &str) -> fmt::Result {
    if is_identifier(name) {
        f.write_str(name)
    } else {
        write!(f, "'{}'", name.replace('\'', "\\'"))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rest {
            f.write_str("...")?;
        }
        f.write_str(&self.name)?;
        if self.optional {
            f.write_str("?")?;
        }
        write!(f, ": {}", self.ty)
    }
}

/// Renders as in a declaration: `<T>(a: string): R`, without the return
/// annotation when there is none.
impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.type_params.is_empty() {
            write!(f, "<{}>", self.type_params.join(", "))?;
        }
        f.write_str("(")?;
        write_params(f, &self.params)?;
        f.write_str(")")?;
        match &self.ret {
            Some(r) => write!(f, ": {r}"),
            None => Ok(()),
        }
    }
}

pub(crate) fn write_params(f: &mut impl fmt::Write, params: &[Param]) -> fmt::Result {
    for (i, p) in params.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

impl fmt::Display for TsType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TsType::String => f.write_str("string"),
            TsType::Number => f.write_str("number"),
            TsType::Boolean => f.write_str("boolean"),
            TsType::Void => f.write_str("void"),
            TsType::Null => f.write_str("null"),
            TsType::Undefined => f.write_str("undefined"),
            TsType::Any => f.write_str("any"),
            TsType::Unknown => f.write_str("unknown"),
            TsType::Never => f.write_str("never"),
            TsType::PlainObject => f.write_str("object"),
            TsType::Named(n) | TsType::InterfaceRef(n) => f.write_str(n),
            TsType::Array(e) => match **e {
                TsType::Union(_) | TsType::Callback(_) | TsType::Intersection(_) => {
                    write!(f, "({e})[]")
                }
                _ => write!(f, "{e}[]"),
            },
            TsType::Callback(sig) => {
                if !sig.type_params.is_empty() {
                    write!(f, "<{}>", sig.type_params.join(", "))?;
                }
                f.write_str("(")?;
                write_params(f, &sig.params)?;
                f.write_str(") => ")?;
                match &sig.ret {
                    Some(r) => write!(f, "{r}"),
                    None => f.write_str("void"),
                }
            }
            TsType::Shape(shape) => {
                if shape.is_empty() {
                    return f.write_str("{}");
                }
                f.write_str("{ ")?;
                let mut first = true;
                let mut sep = |f: &mut fmt::Formatter<'_>| -> fmt::Result {
                    if !first {
                        f.write_str("; ")?;
                    }
                    first = false;
                    Ok(())
                };
                for p in &shape.properties {
                    sep(f)?;
                    if p.readonly {
                        f.write_str("readonly ")?;
                    }
                    write_property_name(f, &p.name)?;
                    if p.optional {
                        f.write_str("?")?;
                    }
                    match (&p.ty, p.method) {
                        (TsType::Callback(sig), true) => {
                            f.write_str("(")?;
                            write_params(f, &sig.params)?;
                            f.write_str(")")?;
                            if let Some(r) = &sig.ret {
                                write!(f, ": {r}")?;
                            }
                        }
                        (ty, _) => write!(f, ": {ty}")?,
                    }
                }
                for s in &shape.call_signatures {
                    sep(f)?;
                    f.write_str("(")?;
                    write_params(f, &s.params)?;
                    f.write_str(")")?;
                    if let Some(r) = &s.ret {
                        write!(f, ": {r}")?;
                    }
                }
                for s in &shape.construct_signatures {
                    sep(f)?;
                    f.write_str("new (")?;
                    write_params(f, &s.params)?;
                    f.write_str(")")?;
                    if let Some(r) = &s.ret {
                        write!(f, ": {r}")?;
                    }
                }
                for ix in &shape.index_signatures {
                    sep(f)?;
                    if ix.readonly {
                        f.write_str("readonly ")?;
                    }
                    write!(f, "[{}: {}]: {}", ix.key_name, ix.key_type, ix.value)?;
                }
                f.write_str(" }")
            }
            TsType::Literal(Literal::String(s)) => write!(f, "'{}'", s.replace('\'', "\\'")),
            TsType::Literal(Literal::Number(n)) => f.write_str(n),
            TsType::Literal(Literal::Boolean(b)) => write!(f, "{b}"),
            TsType::Tuple(ms) => {
                f.write_str("[")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str("]")
            }
            TsType::Union(ms) | TsType::Intersection(ms) => {
                let sep = if matches!(self, TsType::Union(_)) {
                    " | "
                } else {
                    " & "
                };
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    match m {
                        TsType::Callback(_) | TsType::Union(_) | TsType::Intersection(_) => {
                            write!(f, "({m})")?
                        }
                        _ => write!(f, "{m}")?,
                    }
                }
                Ok(())
            }
            TsType::Generic { name, args } => {
                write!(f, "{name}<")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(">")
            }
            TsType::Opaque(text) => f.write_str(text),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_is_flat_sorted_and_deduplicated() {
        let u = TsType::union([
            TsType::Undefined,
            TsType::union([TsType::Number, TsType::String]),
            TsType::Null,
            TsType::String,
            TsType::PlainObject,
        ]);
        assert_eq!(u.to_string(), "string | number | object | null | undefined");
    }

    #[test]
    fn union_member_order_is_input_independent() {
        let a = TsType::union([TsType::Number, TsType::String]);
        let b = TsType::union([TsType::String, TsType::Number]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "string | number");
    }

    #[test]
    fn singleton_and_empty_unions_collapse() {
        assert_eq!(TsType::union([TsType::String, TsType::String]), TsType::String);
        assert_eq!(TsType::union(std::iter::empty()), TsType::Never);
    }

    #[test]
    fn canonical_order_places_refs_before_callbacks_and_arrays() {
        let u = TsType::union([
            TsType::Array(Box::new(TsType::String)),
            TsType::Callback(Box::new(Signature {
                ret: Some(TsType::Void),
                ..Default::default()
            })),
            TsType::InterfaceRef("X.I__a".into()),
            TsType::Named("RegExp".into()),
            TsType::Boolean,
        ]);
        assert_eq!(
            u.to_string(),
            "boolean | RegExp | X.I__a | (() => void) | string[]"
        );
    }

    #[test]
    fn without_undefined_strips_the_marker() {
        let u = TsType::union([TsType::String, TsType::Undefined]);
        assert_eq!(u.without_undefined(), Some(TsType::String));
        assert_eq!(TsType::Undefined.without_undefined(), None);
    }

    #[test]
    fn param_equality_ignores_names() {
        assert_eq!(
            Param::new("str", TsType::String),
            Param::new("value", TsType::String)
        );
        assert_ne!(
            Param::new("a", TsType::String),
            Param::optional("a", TsType::String)
        );
    }

    #[test]
    fn renders_nested_types() {
        let shape = ObjectShape {
            properties: vec![
                Property::new("url", TsType::String),
                Property {
                    optional: true,
                    ..Property::new("my-key", TsType::Number)
                },
            ],
            ..Default::default()
        };
        let t = TsType::Array(Box::new(TsType::union([TsType::String, TsType::Number])));
        assert_eq!(t.to_string(), "(string | number)[]");
        assert_eq!(
            TsType::Shape(shape).to_string(),
            "{ url: string; 'my-key'?: number }"
        );
    }
}
