//! Inference from a [`Trace`] to a [`DeclarationModule`].
//!
//! Every observed call yields a [`CandidateSignature`]. Candidates with
//! the same return type and arity are merged position by position into
//! unions (object shapes merge property by property); the survivors become
//! overloads. `undefined` members then turn into optional parameters and
//! properties, and object shapes are hoisted into named interfaces.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{
    normalize, tag_features, ClassDecl, DeclarationModule, FunctionDecl, InterfaceDecl, Scope,
    TemplateKind,
};
use crate::naming::{camelize, normalize_module_specifier};
use crate::trace::{
    ArgumentContainer, FunctionContainer, FunctionId, Interaction, RuntimeKind, RuntimeType,
    Trace,
};
use crate::types::{is_identifier, ObjectShape, Param, Property, Signature, TsType};

pub const DEFAULT_DEPTH_LIMIT: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct InferenceConfig {
    /// How many levels of nested interfaces to build below a parameter.
    pub depth_limit: usize,
    /// Overrides the package name for matching `requiredModule` and for
    /// the export identifier.
    pub module_name: Option<String>,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            depth_limit: DEFAULT_DEPTH_LIMIT,
            module_name: None,
        }
    }
}

impl InferenceConfig {
    pub fn from_toml(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InferenceError {
    #[error("the trace does not exercise module `{0}`")]
    InsufficientTrace(String),
    #[error("candidate arity mismatch: expected {expected} parameters, found {found}")]
    ArityMismatch { expected: usize, found: usize },
}

/// The signature observed for one call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSignature {
    pub params: Vec<(String, TsType)>,
    pub ret: TsType,
}

impl CandidateSignature {
    /// Orders by the rendered parameter types, then the rendered return
    /// type.
    fn canonical_order(&self, other: &Self) -> Ordering {
        let by_text = |a: &TsType, b: &TsType| {
            if a == b {
                Ordering::Equal
            } else {
                a.to_string().cmp(&b.to_string())
            }
        };
        for ((_, a), (_, b)) in self.params.iter().zip(&other.params) {
            let ord = by_text(a, b);
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.params
            .len()
            .cmp(&other.params.len())
            .then_with(|| by_text(&self.ret, &other.ret))
    }
}

// ---------------------------------------------------------------------
// Type joins

/// Least upper bound used by merging: the union of both types, with all
/// object shapes combined into one shape member.
pub fn join(a: &TsType, b: &TsType) -> TsType {
    let mut shape: Option<ObjectShape> = None;
    let mut rest = Vec::new();
    for m in a.members().into_iter().chain(b.members()) {
        match m {
            TsType::Shape(s) => {
                shape = Some(match shape {
                    None => s.clone(),
                    Some(prev) => join_shapes(&prev, s),
                })
            }
            other => rest.push(other.clone()),
        }
    }
    rest.extend(shape.map(TsType::Shape));
    TsType::union(rest)
}

/// Componentwise merge. A property seen on one side only becomes optional.
pub fn join_shapes(a: &ObjectShape, b: &ObjectShape) -> ObjectShape {
    let mut properties = Vec::with_capacity(a.properties.len() + b.properties.len());
    for pa in &a.properties {
        let merged = match b.property(&pa.name) {
            Some(pb) => Property {
                name: pa.name.clone(),
                ty: join(&pa.ty, &pb.ty),
                optional: pa.optional || pb.optional,
                readonly: pa.readonly && pb.readonly,
                method: pa.method || pb.method,
            },
            None => Property {
                optional: true,
                ..pa.clone()
            },
        };
        properties.push(merged);
    }
    for pb in &b.properties {
        if a.property(&pb.name).is_none() {
            properties.push(Property {
                optional: true,
                ..pb.clone()
            });
        }
    }
    ObjectShape {
        properties,
        ..Default::default()
    }
}

fn sort_shapes(t: TsType) -> TsType {
    let mut has_shape = false;
    t.walk(&mut |m| has_shape |= matches!(m, TsType::Shape(_)));
    if !has_shape {
        return t;
    }
    t.map(&mut |t| match t {
        TsType::Shape(mut s) => {
            s.sort_members();
            TsType::Shape(s)
        }
        other => other,
    })
}

// ---------------------------------------------------------------------
// Merging

/// Merges candidates until no two share a return type. Candidates with
/// equal return types are joined position by position. The result is in
/// canonical order and does not depend on the input order.
pub fn merge_signatures(
    candidates: &[CandidateSignature],
) -> Result<Vec<CandidateSignature>, InferenceError> {
    let Some(first) = candidates.first() else {
        return Ok(Vec::new());
    };
    let arity = first.params.len();
    if let Some(bad) = candidates.iter().find(|c| c.params.len() != arity) {
        return Err(InferenceError::ArityMismatch {
            expected: arity,
            found: bad.params.len(),
        });
    }
    let mut groups: Vec<CandidateSignature> = Vec::new();
    for c in candidates {
        match groups.iter_mut().find(|g| g.ret == c.ret) {
            Some(g) => {
                for ((gname, gt), (cname, ct)) in g.params.iter_mut().zip(&c.params) {
                    if gt != ct {
                        *gt = join(gt, ct);
                    }
                    if cname < gname {
                        gname.clone_from(cname);
                    }
                }
            }
            None => groups.push(c.clone()),
        }
    }
    let mut out: Vec<CandidateSignature> = groups
        .into_iter()
        .map(|g| CandidateSignature {
            params: g
                .params
                .into_iter()
                .map(|(n, t)| (n, sort_shapes(t)))
                .collect(),
            ret: g.ret,
        })
        .collect();
    out.sort_by(CandidateSignature::canonical_order);
    Ok(out)
}

/// Applies null-return handling around [`merge_signatures`]: when exactly
/// one non-null return type was seen, null-returning calls adopt it, and
/// every surviving signature returns `T | null`.
pub fn merge_with_null_returns(
    candidates: &[CandidateSignature],
) -> Result<Vec<CandidateSignature>, InferenceError> {
    let saw_null = candidates.iter().any(|c| c.ret == TsType::Null);
    if !saw_null {
        return merge_signatures(candidates);
    }
    let mut non_null: Vec<&TsType> = Vec::new();
    for r in candidates.iter().map(|c| &c.ret) {
        if *r != TsType::Null && !non_null.contains(&r) {
            non_null.push(r);
        }
    }
    let adopted = match non_null.as_slice() {
        [only] => Some((*only).clone()),
        _ => None,
    };
    let adjusted: Vec<CandidateSignature> = candidates
        .iter()
        .map(|c| match (&adopted, &c.ret) {
            (Some(r), TsType::Null) => CandidateSignature {
                params: c.params.clone(),
                ret: r.clone(),
            },
            _ => c.clone(),
        })
        .collect();
    let mut merged = merge_signatures(&adjusted)?;
    for c in &mut merged {
        c.ret = TsType::union([c.ret.clone(), TsType::Null]);
    }
    merged.sort_by(CandidateSignature::canonical_order);
    Ok(merged)
}

// ---------------------------------------------------------------------
// Finalization

/// Turns `undefined` members into optional properties inside a type.
/// Properties only ever seen as `undefined` are dropped, and an object
/// left without properties becomes `object`.
fn finalize_type(t: TsType) -> TsType {
    t.map(&mut |t| match t {
        TsType::Shape(shape) => {
            let properties: Vec<Property> = shape
                .properties
                .into_iter()
                .filter_map(|p| {
                    let has_undefined = p.ty.contains_member(&TsType::Undefined);
                    let ty = p.ty.without_undefined()?;
                    Some(Property {
                        optional: p.optional || has_undefined,
                        ty,
                        ..p
                    })
                })
                .collect();
            if properties.is_empty() {
                TsType::PlainObject
            } else {
                TsType::Shape(ObjectShape {
                    properties,
                    ..shape
                })
            }
        }
        other => other,
    })
}

/// Converts a merged candidate into a declarable signature.
///
/// Trailing parameters only ever seen as `undefined` are dropped. A
/// parameter that was sometimes `undefined` is optional when every later
/// parameter is optional too; otherwise it keeps an explicit
/// `T | undefined` type, because a required parameter cannot follow an
/// optional one.
pub fn finalize(candidate: &CandidateSignature) -> Signature {
    let mut params: Vec<(String, TsType)> = candidate
        .params
        .iter()
        .map(|(n, t)| (n.clone(), finalize_type(t.clone())))
        .collect();
    while params.last().is_some_and(|(_, t)| *t == TsType::Undefined) {
        params.pop();
    }
    let mut out = Vec::with_capacity(params.len());
    let mut tail_optional = true;
    for (name, ty) in params.into_iter().rev() {
        let param = match ty.without_undefined() {
            Some(rest) if ty.contains_member(&TsType::Undefined) && tail_optional => {
                Param::optional(name, rest)
            }
            _ => {
                tail_optional = false;
                Param::new(name, ty)
            }
        };
        out.push(param);
    }
    out.reverse();
    Signature {
        type_params: Vec::new(),
        params: out,
        ret: Some(finalize_type(candidate.ret.clone())),
    }
}

// ---------------------------------------------------------------------
// Candidates

struct Inferrer<'a> {
    trace: &'a Trace,
    depth_limit: usize,
    in_progress: RefCell<HashSet<FunctionId>>,
}

fn argument_name(container: &FunctionContainer, index: usize) -> String {
    container
        .args
        .get(&index)
        .map(|a| a.argument_name.as_str())
        .filter(|n| is_identifier(n))
        .map_or_else(|| format!("arg{index}"), str::to_string)
}

impl<'a> Inferrer<'a> {
    fn new(trace: &'a Trace, depth_limit: usize) -> Self {
        Inferrer {
            trace,
            depth_limit: depth_limit.max(1),
            in_progress: RefCell::new(HashSet::new()),
        }
    }

    /// A runtime type with no interactions to look at.
    fn plain(&self, rt: &RuntimeType) -> TsType {
        match rt.kind {
            RuntimeKind::String => TsType::String,
            RuntimeKind::Number => TsType::Number,
            RuntimeKind::Boolean => TsType::Boolean,
            RuntimeKind::Undefined => TsType::Undefined,
            RuntimeKind::Null => TsType::Null,
            RuntimeKind::Function => TsType::Callback(Box::new(void_callback())),
            RuntimeKind::Array => TsType::Array(Box::new(match &rt.element {
                Some(e) => self.plain(e),
                None => TsType::PlainObject,
            })),
            RuntimeKind::Object => match rt.constructor_name.as_deref() {
                Some(ctor) if ctor != "Object" => TsType::Named(ctor.to_string()),
                _ => TsType::PlainObject,
            },
        }
    }

    fn return_type(&self, rt: &RuntimeType) -> TsType {
        match rt.kind {
            RuntimeKind::Undefined => TsType::Void,
            _ => self.plain(rt),
        }
    }

    /// The merged, finalized signature of a traced function, used for
    /// callbacks and methods.
    fn callee_signature(&self, id: &FunctionId) -> Option<Signature> {
        let container = self.trace.get(id)?;
        if container.invocations.is_empty() || !self.in_progress.borrow_mut().insert(id.clone())
        {
            return None;
        }
        let candidates = self.candidates(container);
        self.in_progress.borrow_mut().remove(id);
        let merged = merge_with_null_returns(&candidates).ok()?;
        merged.first().map(finalize)
    }

    /// Builds the shape of the object an argument held during one call.
    fn shape_for_call(&self, interactions: &[&Interaction], depth: usize) -> ObjectShape {
        let mut shape = ObjectShape::default();
        for i in interactions {
            let property = match i {
                Interaction::GetField {
                    field,
                    return_type_of,
                    following,
                    ..
                } => {
                    let ty = match return_type_of.kind {
                        RuntimeKind::Object
                            if !following.is_empty()
                                && return_type_of
                                    .constructor_name
                                    .as_deref()
                                    .is_none_or(|c| c == "Object") =>
                        {
                            self.nested(following, depth)
                        }
                        _ => self.plain(return_type_of),
                    };
                    Property::new(field.clone(), ty)
                }
                Interaction::MethodCall {
                    method_name,
                    function_id,
                    following,
                    ..
                } => {
                    let callee = function_id.as_ref().and_then(|id| self.callee_signature(id));
                    let params = callee.as_ref().map(|s| s.params.clone()).unwrap_or_default();
                    let ret = if !following.is_empty() {
                        self.nested(following, depth)
                    } else {
                        callee.and_then(|s| s.ret).unwrap_or(TsType::Void)
                    };
                    Property {
                        method: true,
                        ..Property::new(
                            method_name.clone(),
                            TsType::Callback(Box::new(Signature {
                                type_params: Vec::new(),
                                params,
                                ret: Some(ret),
                            })),
                        )
                    }
                }
                Interaction::UsedAsArgument { .. } | Interaction::Operator { .. } => continue,
            };
            match shape.properties.iter_mut().find(|p| p.name == property.name) {
                Some(existing) => {
                    existing.ty = join(&existing.ty, &property.ty);
                    existing.method |= property.method;
                }
                None => shape.properties.push(property),
            }
        }
        shape
    }

    fn nested(&self, following: &[Interaction], depth: usize) -> TsType {
        if depth <= 1 {
            return TsType::PlainObject;
        }
        let refs: Vec<&Interaction> = following.iter().collect();
        TsType::Shape(self.shape_for_call(&refs, depth - 1))
    }

    fn param_type(&self, arg: Option<&ArgumentContainer>, rt: &RuntimeType, call: usize) -> TsType {
        match (rt.kind, arg) {
            (RuntimeKind::Object, Some(arg))
                if !arg.interactions.is_empty()
                    && rt.constructor_name.as_deref().is_none_or(|c| c == "Object") =>
            {
                let relevant: Vec<&Interaction> = arg
                    .interactions
                    .iter()
                    .filter(|i| i.call_index().is_none_or(|ci| ci == call))
                    .collect();
                TsType::Shape(self.shape_for_call(&relevant, self.depth_limit))
            }
            (RuntimeKind::Function, Some(ArgumentContainer {
                function_id: Some(id),
                ..
            })) => TsType::Callback(Box::new(
                self.callee_signature(id).unwrap_or_else(void_callback),
            )),
            _ => self.plain(rt),
        }
    }

    fn candidates(&self, container: &FunctionContainer) -> Vec<CandidateSignature> {
        container
            .invocations
            .iter()
            .enumerate()
            .map(|(call, inv)| CandidateSignature {
                params: inv
                    .argument_runtime_types
                    .iter()
                    .enumerate()
                    .map(|(i, rt)| {
                        (
                            argument_name(container, i),
                            self.param_type(container.args.get(&i), rt, call),
                        )
                    })
                    .collect(),
                ret: self.return_type(&inv.return_runtime_type),
            })
            .collect()
    }
}

fn void_callback() -> Signature {
    Signature {
        type_params: Vec::new(),
        params: Vec::new(),
        ret: Some(TsType::Void),
    }
}

/// One candidate per recorded invocation of `container`.
pub fn candidate_signatures(
    trace: &Trace,
    container: &FunctionContainer,
    depth_limit: usize,
) -> Vec<CandidateSignature> {
    Inferrer::new(trace, depth_limit).candidates(container)
}

/// The structural type of an object argument across all calls: one shape
/// per call, merged componentwise. An argument without interactions is
/// `object`.
pub fn build_interface(trace: &Trace, arg: &ArgumentContainer, depth_limit: usize) -> TsType {
    if arg.interactions.is_empty() {
        return TsType::PlainObject;
    }
    let inferrer = Inferrer::new(trace, depth_limit);
    let mut calls: Vec<usize> = arg.interactions.iter().filter_map(Interaction::call_index).collect();
    calls.sort_unstable();
    calls.dedup();
    let shapes: Vec<TsType> = if calls.is_empty() {
        let all: Vec<&Interaction> = arg.interactions.iter().collect();
        vec![TsType::Shape(inferrer.shape_for_call(&all, inferrer.depth_limit))]
    } else {
        calls
            .iter()
            .map(|&call| {
                let relevant: Vec<&Interaction> = arg
                    .interactions
                    .iter()
                    .filter(|i| i.call_index().is_none_or(|ci| ci == call))
                    .collect();
                TsType::Shape(inferrer.shape_for_call(&relevant, inferrer.depth_limit))
            })
            .collect()
    };
    let joined = shapes
        .iter()
        .skip(1)
        .fold(shapes[0].clone(), |acc, s| join(&acc, s));
    finalize_type(joined)
}

// ---------------------------------------------------------------------
// Property order

/// First-seen order of fields, so merged interfaces list properties the
/// way the trace encountered them.
#[derive(Default)]
struct FieldOrder {
    names: Vec<String>,
    children: HashMap<String, FieldOrder>,
}

impl FieldOrder {
    fn record(&mut self, interactions: &[Interaction]) {
        for i in interactions {
            let (name, following) = match i {
                Interaction::GetField {
                    field, following, ..
                } => (field, following),
                Interaction::MethodCall {
                    method_name,
                    following,
                    ..
                } => (method_name, following),
                _ => continue,
            };
            if !self.names.contains(name) {
                self.names.push(name.clone());
            }
            self.children
                .entry(name.clone())
                .or_default()
                .record(following);
        }
    }

    fn apply(&self, t: TsType) -> TsType {
        match t {
            TsType::Shape(mut shape) => {
                let pos = |n: &str| self.names.iter().position(|x| x == n).unwrap_or(usize::MAX);
                shape.properties.sort_by_key(|p| pos(&p.name));
                for p in &mut shape.properties {
                    let Some(child) = self.children.get(&p.name) else {
                        continue;
                    };
                    let ty = std::mem::replace(&mut p.ty, TsType::Never);
                    p.ty = match ty {
                        TsType::Callback(mut sig) if p.method => {
                            sig.ret = sig.ret.map(|r| child.apply(r));
                            TsType::Callback(sig)
                        }
                        other => child.apply(other),
                    };
                }
                TsType::Shape(shape)
            }
            TsType::Union(ms) => TsType::Union(ms.into_iter().map(|m| self.apply(m)).collect()),
            TsType::Array(e) => TsType::Array(Box::new(self.apply(*e))),
            other => other,
        }
    }
}

// ---------------------------------------------------------------------
// Interface hoisting

struct Hoister {
    qualifier: Option<String>,
    interfaces: Vec<InterfaceDecl>,
}

impl Hoister {
    fn reference(&self, name: &str) -> TsType {
        TsType::InterfaceRef(match &self.qualifier {
            Some(q) => format!("{q}.{name}"),
            None => name.to_string(),
        })
    }

    fn register(&mut self, base: &str, shape: ObjectShape) -> TsType {
        let mut canonical = shape.clone();
        canonical.sort_members();
        for existing in &self.interfaces {
            let mut other = existing.shape.clone();
            other.sort_members();
            if other == canonical {
                return self.reference(&existing.name);
            }
        }
        let taken = |n: &str| self.interfaces.iter().any(|i| i.name == n);
        let mut name = base.to_string();
        let mut n = 2;
        while taken(&name) {
            name = format!("{base}{n}");
            n += 1;
        }
        self.interfaces.push(InterfaceDecl {
            name: name.clone(),
            type_params: Vec::new(),
            extends: Vec::new(),
            shape,
        });
        self.reference(&name)
    }

    fn hoist_type(&mut self, t: TsType, path: &str) -> TsType {
        match t {
            TsType::Shape(shape) => {
                let shape = self.hoist_shape(shape, path);
                self.register(path, shape)
            }
            TsType::Union(ms) => TsType::union(ms.into_iter().map(|m| self.hoist_type(m, path))),
            TsType::Array(e) => TsType::Array(Box::new(self.hoist_type(*e, path))),
            TsType::Callback(sig) => TsType::Callback(Box::new(self.hoist_signature(*sig, path))),
            other => other,
        }
    }

    fn hoist_shape(&mut self, shape: ObjectShape, path: &str) -> ObjectShape {
        ObjectShape {
            properties: shape
                .properties
                .into_iter()
                .map(|p| {
                    let sub = format!("{path}__{}", p.name);
                    Property {
                        ty: self.hoist_type(p.ty.clone(), &sub),
                        ..p
                    }
                })
                .collect(),
            ..shape
        }
    }

    /// Parameters hoist under `<path>__<param>`, the return type under
    /// `<path>` itself.
    fn hoist_signature(&mut self, sig: Signature, path: &str) -> Signature {
        Signature {
            params: sig
                .params
                .into_iter()
                .map(|p| {
                    let sub = format!("{path}__{}", p.name);
                    Param {
                        ty: self.hoist_type(p.ty.clone(), &sub),
                        ..p
                    }
                })
                .collect(),
            ret: sig.ret.map(|r| self.hoist_type(r, path)),
            type_params: sig.type_params,
        }
    }

    /// Top-level parameters hoist as `I__<param>`; return types are never
    /// shapes at this level.
    fn hoist_function(&mut self, sig: Signature) -> Signature {
        Signature {
            params: sig
                .params
                .into_iter()
                .map(|p| {
                    let path = format!("I__{}", p.name);
                    Param {
                        ty: self.hoist_type(p.ty.clone(), &path),
                        ..p
                    }
                })
                .collect(),
            ..sig
        }
    }
}

// ---------------------------------------------------------------------
// Templates

fn belongs_to(container: &FunctionContainer, module: &str) -> bool {
    normalize_module_specifier(&container.required_module) == normalize_module_specifier(module)
}

/// Containers of the module, in natural id order.
fn module_containers<'t>(
    trace: &'t Trace,
    module: &str,
) -> Vec<(&'t FunctionId, &'t FunctionContainer)> {
    trace
        .functions
        .iter()
        .filter(|(_, c)| belongs_to(c, module))
        .collect()
}

/// Picks the declaration template from how the module was used: a
/// constructed export is a class, a called export a function, and
/// anything else (only members used) a plain module.
pub fn select_template(trace: &Trace, module_name: &str) -> Result<TemplateKind, InferenceError> {
    let containers = module_containers(trace, module_name);
    let is_class = containers
        .iter()
        .any(|(_, c)| (c.is_exported && c.is_constructor) || c.is_instance_method);
    if is_class {
        return Ok(TemplateKind::ModuleClass);
    }
    let invoked: Vec<_> = containers
        .iter()
        .filter(|(_, c)| !c.invocations.is_empty())
        .collect();
    if invoked.iter().any(|(_, c)| c.is_exported) {
        Ok(TemplateKind::ModuleFunction)
    } else if !invoked.is_empty() {
        Ok(TemplateKind::Module)
    } else {
        Err(InferenceError::InsufficientTrace(module_name.to_string()))
    }
}

/// Candidates for all containers sharing one function name, padded to a
/// common arity.
fn grouped_candidates(
    inferrer: &Inferrer<'_>,
    containers: &[&FunctionContainer],
) -> Vec<CandidateSignature> {
    let mut all: Vec<CandidateSignature> = containers
        .iter()
        .flat_map(|c| inferrer.candidates(c))
        .collect();
    let arity = all.iter().map(|c| c.params.len()).max().unwrap_or(0);
    for c in &mut all {
        while c.params.len() < arity {
            c.params.push((format!("arg{}", c.params.len()), TsType::Undefined));
        }
    }
    all
}

struct Builder<'a> {
    inferrer: Inferrer<'a>,
    hoister: Hoister,
}

impl Builder<'_> {
    /// Final signatures for a group of containers denoting one function.
    fn signatures(&mut self, containers: &[&FunctionContainer], constructor: bool) -> Vec<Signature> {
        let candidates = grouped_candidates(&self.inferrer, containers);
        let merged = merge_with_null_returns(&candidates)
            .expect("grouped candidates are padded to one arity");
        let mut order: Vec<FieldOrder> = Vec::new();
        for c in containers {
            for (&i, arg) in &c.args {
                if order.len() <= i {
                    order.resize_with(i + 1, FieldOrder::default);
                }
                order[i].record(&arg.interactions);
            }
        }
        merged
            .iter()
            .map(|m| {
                let mut sig = finalize(m);
                for (i, p) in sig.params.iter_mut().enumerate() {
                    if let Some(o) = order.get(i) {
                        p.ty = o.apply(std::mem::replace(&mut p.ty, TsType::Never));
                    }
                }
                if constructor {
                    sig.ret = None;
                }
                self.hoister.hoist_function(sig)
            })
            .collect()
    }

    /// One declaration per distinct function name, in first-seen order.
    fn functions(&mut self, containers: &[&FunctionContainer]) -> Vec<FunctionDecl> {
        let mut by_name: Vec<(String, Vec<&FunctionContainer>)> = Vec::new();
        for c in containers.iter().filter(|c| !c.invocations.is_empty()) {
            match by_name.iter_mut().find(|(n, _)| *n == c.function_name) {
                Some((_, group)) => group.push(c),
                None => by_name.push((c.function_name.clone(), vec![c])),
            }
        }
        by_name
            .into_iter()
            .filter(|(name, _)| is_identifier(name))
            .map(|(name, group)| FunctionDecl::new(name, self.signatures(&group, false)))
            .collect()
    }
}

/// Infers the declaration module for `module_name` from a trace.
pub fn infer_module(
    trace: &Trace,
    module_name: &str,
    config: &InferenceConfig,
) -> Result<DeclarationModule, InferenceError> {
    let module = config.module_name.as_deref().unwrap_or(module_name);
    let template = select_template(trace, module)?;
    let containers: Vec<&FunctionContainer> = module_containers(trace, module)
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    let mut export_name = camelize(module);

    if template == TemplateKind::ModuleClass {
        if let Some(ctor) = containers
            .iter()
            .find(|c| c.is_exported && c.is_constructor && is_identifier(&c.function_name))
        {
            export_name = ctor.function_name.clone();
        }
    }

    let mut builder = Builder {
        inferrer: Inferrer::new(trace, config.depth_limit),
        hoister: Hoister {
            qualifier: (template != TemplateKind::Module).then(|| export_name.clone()),
            interfaces: Vec::new(),
        },
    };

    let mut out = DeclarationModule::new(module_name, template);
    match template {
        TemplateKind::ModuleClass => {
            let ctors: Vec<&FunctionContainer> = containers
                .iter()
                .copied()
                .filter(|c| c.is_exported && c.is_constructor && !c.invocations.is_empty())
                .collect();
            let constructors = if ctors.is_empty() {
                Vec::new()
            } else {
                builder.signatures(&ctors, true)
            };
            let instance: Vec<&FunctionContainer> = containers
                .iter()
                .copied()
                .filter(|c| c.is_instance_method)
                .collect();
            let methods = builder.functions(&instance);
            let statics: Vec<&FunctionContainer> = containers
                .iter()
                .copied()
                .filter(|c| !c.is_exported && !c.is_instance_method && !c.is_constructor)
                .collect();
            let namespace_functions = builder.functions(&statics);
            out.scope.classes.push(ClassDecl {
                name: export_name.clone(),
                type_params: Vec::new(),
                constructors,
                methods,
                properties: Vec::new(),
            });
            out.scope.namespaces.insert(
                export_name.clone(),
                Scope {
                    functions: namespace_functions,
                    interfaces: std::mem::take(&mut builder.hoister.interfaces),
                    ..Scope::default()
                },
            );
            out.export_assignment = Some(export_name);
        }
        TemplateKind::ModuleFunction => {
            let main: Vec<&FunctionContainer> = containers
                .iter()
                .copied()
                .filter(|c| c.is_exported && !c.is_constructor && !c.invocations.is_empty())
                .collect();
            let overloads = builder.signatures(&main, false);
            let members: Vec<&FunctionContainer> = containers
                .iter()
                .copied()
                .filter(|c| !c.is_exported && !c.is_instance_method && !c.is_constructor)
                .collect();
            let namespace_functions = builder.functions(&members);
            out.scope
                .functions
                .push(FunctionDecl::new(export_name.clone(), overloads));
            let namespace = Scope {
                functions: namespace_functions,
                interfaces: std::mem::take(&mut builder.hoister.interfaces),
                ..Scope::default()
            };
            if !namespace.is_empty() {
                out.scope.namespaces.insert(export_name.clone(), namespace);
            }
            out.export_assignment = Some(export_name);
        }
        TemplateKind::Module => {
            let members: Vec<&FunctionContainer> = containers
                .iter()
                .copied()
                .filter(|c| !c.is_instance_method && !c.is_constructor)
                .collect();
            out.scope.functions = builder.functions(&members);
            out.scope.interfaces = std::mem::take(&mut builder.hoister.interfaces);
        }
    }
    if out.scope.functions.is_empty() && out.scope.classes.is_empty() {
        return Err(InferenceError::InsufficientTrace(module.to_string()));
    }
    out.feature_tags = tag_features(&out);
    Ok(out)
}

/// Convenience for tests and callers that only need the canonical form.
pub fn infer_normalized(
    trace: &Trace,
    module_name: &str,
    config: &InferenceConfig,
) -> Result<DeclarationModule, InferenceError> {
    infer_module(trace, module_name, config).map(normalize)
}

/// Nesting depth of every interface in the module: 1 for an interface
/// that references no other interface.
pub fn interface_depths(module: &DeclarationModule) -> BTreeMap<String, usize> {
    fn scope_interfaces<'a>(scope: &'a Scope, out: &mut Vec<&'a InterfaceDecl>) {
        out.extend(&scope.interfaces);
        for ns in scope.namespaces.values() {
            scope_interfaces(ns, out);
        }
    }
    let mut all = Vec::new();
    scope_interfaces(&module.scope, &mut all);
    let by_name: HashMap<&str, &InterfaceDecl> = all
        .iter()
        .map(|i| (i.name.as_str(), *i))
        .collect();
    fn depth(
        name: &str,
        by_name: &HashMap<&str, &InterfaceDecl>,
        seen: &mut Vec<String>,
    ) -> usize {
        let Some(decl) = by_name.get(name) else {
            return 0;
        };
        if seen.iter().any(|s| s == name) {
            return 0;
        }
        seen.push(name.to_string());
        let mut deepest = 0;
        decl.shape.walk_types(&mut |t| {
            if let TsType::InterfaceRef(r) = t {
                let local = r.rsplit('.').next().unwrap_or(r);
                deepest = deepest.max(depth(local, by_name, &mut seen.clone()));
            }
        });
        seen.pop();
        1 + deepest
    }
    all.iter()
        .map(|i| (i.name.clone(), depth(&i.name, &by_name, &mut Vec::new())))
        .collect()
}
