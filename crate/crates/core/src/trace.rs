//! Interaction traces recorded by the JavaScript tracer and their JSON
//! encoding (schema version 1).
//!
//! A trace maps function ids to [`FunctionContainer`]s. Each container
//! holds one [`ArgumentContainer`] per observed argument position, with
//! the interactions the library performed on that argument, plus one
//! [`InvocationRecord`] per call carrying the runtime type of every
//! argument and of the return value.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::naming::normalize_module_specifier;

pub const SCHEMA_VERSION: u64 = 1;

/// Deepest `followingInteractions` nesting accepted on load. Anything
/// deeper can only come from a tracer that failed to break an identity
/// cycle.
pub const MAX_INTERACTION_DEPTH: usize = 32;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("malformed trace JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schemaVersion {0}")]
    SchemaVersion(Value),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: unknown interaction code `{code}`")]
    UnknownInteraction { path: String, code: String },
    #[error("{path}: functionId `{id}` does not name a container")]
    DanglingFunctionId { path: String, id: String },
    #[error("{path}: cyclic followingInteractions")]
    CyclicInteractions { path: String },
}

fn invalid(path: &str, message: impl Into<String>) -> TraceError {
    TraceError::Invalid {
        path: path.to_string(),
        message: message.into(),
    }
}

/// A container id such as `functionId_12`. Ordered naturally, so
/// `functionId_2` sorts before `functionId_10`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FunctionId(pub String);

impl FunctionId {
    fn split(&self) -> (&str, Option<u64>) {
        let digits = self
            .0
            .bytes()
            .rev()
            .take_while(|b| b.is_ascii_digit())
            .count();
        let (head, tail) = self.0.split_at(self.0.len() - digits);
        (head, tail.parse().ok())
    }
}

impl Ord for FunctionId {
    fn cmp(&self, other: &Self) -> Ordering {
        let (ha, na) = self.split();
        let (hb, nb) = other.split();
        ha.cmp(hb).then(na.cmp(&nb)).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for FunctionId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for FunctionId {
    fn from(s: &str) -> Self {
        FunctionId(s.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuntimeKind {
    String,
    Number,
    Boolean,
    Undefined,
    Null,
    Function,
    Array,
    Object,
}

impl RuntimeKind {
    fn as_str(self) -> &'static str {
        match self {
            RuntimeKind::String => "string",
            RuntimeKind::Number => "number",
            RuntimeKind::Boolean => "boolean",
            RuntimeKind::Undefined => "undefined",
            RuntimeKind::Null => "null",
            RuntimeKind::Function => "function",
            RuntimeKind::Array => "array",
            RuntimeKind::Object => "object",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "string" => RuntimeKind::String,
            "number" => RuntimeKind::Number,
            "boolean" => RuntimeKind::Boolean,
            "undefined" => RuntimeKind::Undefined,
            "null" => RuntimeKind::Null,
            "function" => RuntimeKind::Function,
            "array" => RuntimeKind::Array,
            "object" => RuntimeKind::Object,
            _ => return None,
        })
    }
}

/// The runtime type of a value as seen by the tracer.
///
/// Encoded as one string: a kind name (`"string"`, `"object"`), a
/// constructor name for objects (`"RegExp"`), or `"<elem>[]"` for an array
/// whose first element has the given type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RuntimeType {
    pub kind: RuntimeKind,
    /// Only for [`RuntimeKind::Object`].
    pub constructor_name: Option<String>,
    /// Only for [`RuntimeKind::Array`]: the type of element 0, if any.
    pub element: Option<Box<RuntimeType>>,
}

impl RuntimeType {
    pub const fn of(kind: RuntimeKind) -> Self {
        RuntimeType {
            kind,
            constructor_name: None,
            element: None,
        }
    }

    pub fn object_of(constructor: &str) -> Self {
        RuntimeType {
            kind: RuntimeKind::Object,
            constructor_name: Some(constructor.to_string()),
            element: None,
        }
    }

    pub fn array_of(element: RuntimeType) -> Self {
        RuntimeType {
            kind: RuntimeKind::Array,
            constructor_name: None,
            element: Some(Box::new(element)),
        }
    }

    pub fn undefined() -> Self {
        RuntimeType::of(RuntimeKind::Undefined)
    }
}

impl fmt::Display for RuntimeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.kind, &self.constructor_name, &self.element) {
            (RuntimeKind::Object, Some(ctor), _) => f.write_str(ctor),
            (RuntimeKind::Array, _, Some(elem)) => write!(f, "{elem}[]"),
            (kind, _, _) => f.write_str(kind.as_str()),
        }
    }
}

#[derive(Debug, Error)]
#[error("invalid runtime type `{0}`")]
pub struct RuntimeTypeParseError(String);

impl FromStr for RuntimeType {
    type Err = RuntimeTypeParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(elem) = s.strip_suffix("[]") {
            return Ok(RuntimeType::array_of(elem.parse()?));
        }
        if let Some(kind) = RuntimeKind::parse(s) {
            return Ok(RuntimeType::of(kind));
        }
        let is_ctor = s.starts_with(|c: char| c.is_ascii_uppercase())
            && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$');
        if is_ctor {
            Ok(RuntimeType::object_of(s))
        } else {
            Err(RuntimeTypeParseError(s.to_string()))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorArity {
    Binary,
    Unary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Interaction {
    GetField {
        field: String,
        return_type_of: RuntimeType,
        following: Vec<Interaction>,
        call_index: Option<usize>,
    },
    MethodCall {
        method_name: String,
        function_id: Option<FunctionId>,
        following: Vec<Interaction>,
        call_index: Option<usize>,
    },
    UsedAsArgument {
        callee_function_id: Option<FunctionId>,
        call_index: Option<usize>,
    },
    /// Operator events are accepted but carry no information inference
    /// uses.
    Operator {
        arity: OperatorArity,
        operator: Option<String>,
        call_index: Option<usize>,
    },
}

impl Interaction {
    pub fn get_field(field: &str, return_type_of: RuntimeType) -> Self {
        Interaction::GetField {
            field: field.to_string(),
            return_type_of,
            following: Vec::new(),
            call_index: None,
        }
    }

    pub fn call_index(&self) -> Option<usize> {
        match self {
            Interaction::GetField { call_index, .. }
            | Interaction::MethodCall { call_index, .. }
            | Interaction::UsedAsArgument { call_index, .. }
            | Interaction::Operator { call_index, .. } => *call_index,
        }
    }

    fn call_index_mut(&mut self) -> &mut Option<usize> {
        match self {
            Interaction::GetField { call_index, .. }
            | Interaction::MethodCall { call_index, .. }
            | Interaction::UsedAsArgument { call_index, .. }
            | Interaction::Operator { call_index, .. } => call_index,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Interaction::GetField { .. } => "getField",
            Interaction::MethodCall { .. } => "methodCall",
            Interaction::UsedAsArgument { .. } => "usedAsArgument",
            Interaction::Operator {
                arity: OperatorArity::Binary,
                ..
            } => "binaryOperation",
            Interaction::Operator {
                arity: OperatorArity::Unary,
                ..
            } => "unaryOperation",
        }
    }

    fn remap_ids(&mut self, map: &HashMap<FunctionId, FunctionId>) {
        match self {
            Interaction::GetField { following, .. } => {
                following.iter_mut().for_each(|i| i.remap_ids(map))
            }
            Interaction::MethodCall {
                function_id,
                following,
                ..
            } => {
                remap(function_id, map);
                following.iter_mut().for_each(|i| i.remap_ids(map));
            }
            Interaction::UsedAsArgument {
                callee_function_id, ..
            } => remap(callee_function_id, map),
            Interaction::Operator { .. } => {}
        }
    }
}

fn remap(id: &mut Option<FunctionId>, map: &HashMap<FunctionId, FunctionId>) {
    if let Some(new) = id.as_ref().and_then(|old| map.get(old)) {
        *id = Some(new.clone());
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArgumentContainer {
    pub argument_name: String,
    pub argument_index: usize,
    pub interactions: Vec<Interaction>,
    /// Set when the argument was a function whose invocations were traced
    /// as their own container.
    pub function_id: Option<FunctionId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvocationRecord {
    pub argument_runtime_types: Vec<RuntimeType>,
    pub return_runtime_type: RuntimeType,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FunctionContainer {
    pub function_name: String,
    pub is_exported: bool,
    pub is_constructor: bool,
    /// Invoked on an instance produced by the module rather than on the
    /// module's export itself.
    pub is_instance_method: bool,
    pub required_module: String,
    pub args: BTreeMap<usize, ArgumentContainer>,
    pub invocations: Vec<InvocationRecord>,
}

impl FunctionContainer {
    /// Number of argument positions in the padded invocation records.
    pub fn arity(&self) -> usize {
        self.invocations
            .first()
            .map_or(0, |i| i.argument_runtime_types.len())
    }

    fn pad_to(&mut self, arity: usize) {
        for inv in &mut self.invocations {
            while inv.argument_runtime_types.len() < arity {
                inv.argument_runtime_types.push(RuntimeType::undefined());
            }
        }
    }

    fn identity(&self) -> (String, String, bool, bool, bool) {
        (
            self.function_name.clone(),
            normalize_module_specifier(&self.required_module).to_string(),
            self.is_exported,
            self.is_constructor,
            self.is_instance_method,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub functions: BTreeMap<FunctionId, FunctionContainer>,
}

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn get(&self, id: &FunctionId) -> Option<&FunctionContainer> {
        self.functions.get(id)
    }

    /// Folds the containers of another run into this trace. Containers
    /// denoting the same function (same name, module and flags) are
    /// combined; the rest are added under fresh ids.
    pub fn merge(&mut self, other: &Trace) {
        let mut next = self
            .functions
            .keys()
            .filter_map(|id| id.split().1)
            .max()
            .unwrap_or(0)
            + 1;
        let mut by_identity: HashMap<_, FunctionId> = self
            .functions
            .iter()
            .map(|(id, c)| (c.identity(), id.clone()))
            .collect();

        let mut id_map = HashMap::new();
        for (id, c) in &other.functions {
            let target = match by_identity.get(&c.identity()) {
                Some(existing) => existing.clone(),
                None => {
                    let fresh = FunctionId(format!("functionId_{next}"));
                    next += 1;
                    by_identity.insert(c.identity(), fresh.clone());
                    fresh
                }
            };
            id_map.insert(id.clone(), target);
        }

        for (id, c) in &other.functions {
            let target = id_map[id].clone();
            let mut incoming = c.clone();
            for arg in incoming.args.values_mut() {
                remap(&mut arg.function_id, &id_map);
                for i in &mut arg.interactions {
                    i.remap_ids(&id_map);
                }
            }
            match self.functions.get_mut(&target) {
                None => {
                    self.functions.insert(target, incoming);
                }
                Some(existing) => {
                    let offset = existing.invocations.len();
                    let arity = existing.arity().max(incoming.arity());
                    for (index, arg) in incoming.args {
                        let slot = existing.args.entry(index).or_insert_with(|| {
                            ArgumentContainer {
                                argument_name: arg.argument_name.clone(),
                                argument_index: index,
                                ..Default::default()
                            }
                        });
                        if slot.argument_name.is_empty() {
                            slot.argument_name = arg.argument_name.clone();
                        }
                        if slot.function_id.is_none() {
                            slot.function_id = arg.function_id.clone();
                        }
                        for mut i in arg.interactions {
                            if let Some(ci) = i.call_index_mut() {
                                *ci += offset;
                            }
                            slot.interactions.push(i);
                        }
                    }
                    existing.invocations.extend(incoming.invocations);
                    existing.pad_to(arity);
                }
            }
        }
    }
}

// ---------------------------------------------------------------------
// Loading

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawContainer {
    #[serde(default)]
    function_name: String,
    #[serde(default)]
    is_exported: bool,
    #[serde(default)]
    is_constructor: bool,
    #[serde(default)]
    is_instance_method: bool,
    #[serde(default)]
    required_module: Option<String>,
    #[serde(default)]
    args: BTreeMap<String, RawArgument>,
    #[serde(default)]
    invocations: Vec<RawInvocation>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawArgument {
    #[serde(default)]
    argument_name: String,
    #[serde(default)]
    argument_index: Option<usize>,
    #[serde(default)]
    interactions: Vec<RawInteraction>,
    #[serde(default)]
    function_id: Option<String>,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawInvocation {
    argument_runtime_types: Vec<String>,
    return_runtime_type: String,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawInteraction {
    code: String,
    field: Option<String>,
    method_name: Option<String>,
    function_id: Option<String>,
    callee_function_id: Option<String>,
    return_type_of: Option<String>,
    following_interactions: Option<Vec<RawInteraction>>,
    operator: Option<String>,
    call_index: Option<usize>,
}

/// Parses and validates a trace. Accepts the versioned envelope as well as
/// a bare map of function ids.
pub fn load_trace(json_text: &str) -> Result<Trace, TraceError> {
    let value: Value = serde_json::from_str(json_text)?;
    let Value::Object(mut top) = value else {
        return Err(invalid("$", "top level must be an object"));
    };
    let functions = if top.contains_key("functions") || top.contains_key("schemaVersion") {
        match top.remove("schemaVersion") {
            None => {}
            Some(v) if v.as_u64() == Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(TraceError::SchemaVersion(v)),
        }
        let functions = top.remove("functions").unwrap_or(Value::Object(Map::new()));
        if let Some(extra) = top.keys().next() {
            return Err(invalid("$", format!("unexpected key `{extra}`")));
        }
        functions
    } else {
        Value::Object(top)
    };
    let raw: BTreeMap<String, RawContainer> = serde_json::from_value(functions)?;

    let mut trace = Trace::default();
    for (id, rc) in raw {
        let path = format!("$.functions.{id}");
        trace
            .functions
            .insert(FunctionId(id), convert_container(&path, rc)?);
    }
    validate(&trace)?;
    Ok(trace)
}

fn runtime_type(path: &str, s: &str) -> Result<RuntimeType, TraceError> {
    s.parse().map_err(|e: RuntimeTypeParseError| invalid(path, e.to_string()))
}

fn convert_container(path: &str, rc: RawContainer) -> Result<FunctionContainer, TraceError> {
    let mut args = BTreeMap::new();
    for (key, ra) in rc.args {
        let apath = format!("{path}.args.{key}");
        let index: usize = key
            .parse()
            .map_err(|_| invalid(&apath, "argument key must be a non-negative integer"))?;
        if let Some(declared) = ra.argument_index {
            if declared != index {
                return Err(invalid(
                    &apath,
                    format!("argumentIndex {declared} does not match its key"),
                ));
            }
        }
        let interactions = ra
            .interactions
            .into_iter()
            .enumerate()
            .map(|(i, ri)| convert_interaction(&format!("{apath}.interactions[{i}]"), ri, true))
            .collect::<Result<_, _>>()?;
        args.insert(
            index,
            ArgumentContainer {
                argument_name: ra.argument_name,
                argument_index: index,
                interactions,
                function_id: ra.function_id.map(FunctionId),
            },
        );
    }
    let invocations = rc
        .invocations
        .into_iter()
        .enumerate()
        .map(|(i, ri)| {
            let ipath = format!("{path}.invocations[{i}]");
            Ok(InvocationRecord {
                argument_runtime_types: ri
                    .argument_runtime_types
                    .iter()
                    .map(|s| runtime_type(&ipath, s))
                    .collect::<Result<_, _>>()?,
                return_runtime_type: runtime_type(&ipath, &ri.return_runtime_type)?,
            })
        })
        .collect::<Result<_, TraceError>>()?;
    Ok(FunctionContainer {
        function_name: rc.function_name,
        is_exported: rc.is_exported,
        is_constructor: rc.is_constructor,
        is_instance_method: rc.is_instance_method,
        required_module: rc.required_module.unwrap_or_default(),
        args,
        invocations,
    })
}

fn convert_interaction(
    path: &str,
    ri: RawInteraction,
    top_level: bool,
) -> Result<Interaction, TraceError> {
    let reject = |present: bool, name: &str| {
        if present {
            Err(invalid(
                path,
                format!("field `{name}` is not allowed for code `{}`", ri.code),
            ))
        } else {
            Ok(())
        }
    };
    if !top_level && ri.call_index.is_some() {
        return Err(invalid(path, "callIndex is only allowed on top-level interactions"));
    }
    let following = |raw: Option<Vec<RawInteraction>>| -> Result<Vec<Interaction>, TraceError> {
        raw.unwrap_or_default()
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                convert_interaction(&format!("{path}.followingInteractions[{i}]"), r, false)
            })
            .collect()
    };
    match ri.code.as_str() {
        "getField" => {
            reject(ri.method_name.is_some(), "methodName")?;
            reject(ri.function_id.is_some(), "functionId")?;
            reject(ri.callee_function_id.is_some(), "calleeFunctionId")?;
            reject(ri.operator.is_some(), "operator")?;
            let field = ri.field.ok_or_else(|| invalid(path, "getField requires `field`"))?;
            let rt = ri
                .return_type_of
                .ok_or_else(|| invalid(path, "getField requires `returnTypeOf`"))?;
            Ok(Interaction::GetField {
                field,
                return_type_of: runtime_type(path, &rt)?,
                following: following(ri.following_interactions)?,
                call_index: ri.call_index,
            })
        }
        "methodCall" => {
            reject(ri.field.is_some(), "field")?;
            reject(ri.return_type_of.is_some(), "returnTypeOf")?;
            reject(ri.callee_function_id.is_some(), "calleeFunctionId")?;
            reject(ri.operator.is_some(), "operator")?;
            let method_name = ri
                .method_name
                .ok_or_else(|| invalid(path, "methodCall requires `methodName`"))?;
            Ok(Interaction::MethodCall {
                method_name,
                function_id: ri.function_id.map(FunctionId),
                following: following(ri.following_interactions)?,
                call_index: ri.call_index,
            })
        }
        "usedAsArgument" => {
            reject(ri.field.is_some(), "field")?;
            reject(ri.method_name.is_some(), "methodName")?;
            reject(ri.function_id.is_some(), "functionId")?;
            reject(ri.return_type_of.is_some(), "returnTypeOf")?;
            reject(ri.following_interactions.is_some(), "followingInteractions")?;
            reject(ri.operator.is_some(), "operator")?;
            Ok(Interaction::UsedAsArgument {
                callee_function_id: ri.callee_function_id.map(FunctionId),
                call_index: ri.call_index,
            })
        }
        "binaryOperation" | "unaryOperation" => {
            reject(ri.field.is_some(), "field")?;
            reject(ri.method_name.is_some(), "methodName")?;
            reject(ri.function_id.is_some(), "functionId")?;
            reject(ri.callee_function_id.is_some(), "calleeFunctionId")?;
            reject(ri.return_type_of.is_some(), "returnTypeOf")?;
            reject(ri.following_interactions.is_some(), "followingInteractions")?;
            Ok(Interaction::Operator {
                arity: if ri.code == "binaryOperation" {
                    OperatorArity::Binary
                } else {
                    OperatorArity::Unary
                },
                operator: ri.operator,
                call_index: ri.call_index,
            })
        }
        other => Err(TraceError::UnknownInteraction {
            path: path.to_string(),
            code: other.to_string(),
        }),
    }
}

fn validate(trace: &Trace) -> Result<(), TraceError> {
    let check_id = |path: &str, id: &Option<FunctionId>| match id {
        Some(id) if !trace.functions.contains_key(id) => Err(TraceError::DanglingFunctionId {
            path: path.to_string(),
            id: id.0.clone(),
        }),
        _ => Ok(()),
    };
    for (fid, c) in &trace.functions {
        let path = format!("$.functions.{fid}");
        if let Some(first) = c.invocations.first() {
            let arity = first.argument_runtime_types.len();
            if c
                .invocations
                .iter()
                .any(|i| i.argument_runtime_types.len() != arity)
            {
                return Err(invalid(
                    &path,
                    "invocation records must be padded to a common arity",
                ));
            }
        }
        for (index, arg) in &c.args {
            let apath = format!("{path}.args.{index}");
            check_id(&apath, &arg.function_id)?;
            for (n, i) in arg.interactions.iter().enumerate() {
                let ipath = format!("{apath}.interactions[{n}]");
                if let Some(ci) = i.call_index() {
                    if ci >= c.invocations.len() {
                        return Err(invalid(
                            &ipath,
                            format!("callIndex {ci} exceeds {} invocations", c.invocations.len()),
                        ));
                    }
                }
                let mut chain = Vec::new();
                validate_interaction(&ipath, i, 1, &mut chain, &check_id)?;
            }
        }
    }
    Ok(())
}

fn validate_interaction<'a>(
    path: &str,
    interaction: &'a Interaction,
    depth: usize,
    chain: &mut Vec<&'a FunctionId>,
    check_id: &dyn Fn(&str, &Option<FunctionId>) -> Result<(), TraceError>,
) -> Result<(), TraceError> {
    if depth > MAX_INTERACTION_DEPTH {
        return Err(TraceError::CyclicInteractions {
            path: path.to_string(),
        });
    }
    match interaction {
        Interaction::GetField { following, .. } => {
            for (n, f) in following.iter().enumerate() {
                validate_interaction(
                    &format!("{path}.followingInteractions[{n}]"),
                    f,
                    depth + 1,
                    chain,
                    check_id,
                )?;
            }
        }
        Interaction::MethodCall {
            function_id,
            following,
            ..
        } => {
            check_id(path, function_id)?;
            if let Some(id) = function_id {
                if chain.contains(&id) {
                    return Err(TraceError::CyclicInteractions {
                        path: path.to_string(),
                    });
                }
                chain.push(id);
            }
            for (n, f) in following.iter().enumerate() {
                validate_interaction(
                    &format!("{path}.followingInteractions[{n}]"),
                    f,
                    depth + 1,
                    chain,
                    check_id,
                )?;
            }
            if function_id.is_some() {
                chain.pop();
            }
        }
        Interaction::UsedAsArgument {
            callee_function_id, ..
        } => check_id(path, callee_function_id)?,
        Interaction::Operator { .. } => {}
    }
    Ok(())
}

// ---------------------------------------------------------------------
// Saving

fn interaction_json(i: &Interaction) -> Value {
    let mut m = Map::new();
    m.insert("code".into(), json!(i.code()));
    match i {
        Interaction::GetField {
            field,
            return_type_of,
            following,
            ..
        } => {
            m.insert("field".into(), json!(field));
            m.insert("returnTypeOf".into(), json!(return_type_of.to_string()));
            m.insert(
                "followingInteractions".into(),
                Value::Array(following.iter().map(interaction_json).collect()),
            );
        }
        Interaction::MethodCall {
            method_name,
            function_id,
            following,
            ..
        } => {
            m.insert("methodName".into(), json!(method_name));
            if let Some(id) = function_id {
                m.insert("functionId".into(), json!(id.0));
            }
            m.insert(
                "followingInteractions".into(),
                Value::Array(following.iter().map(interaction_json).collect()),
            );
        }
        Interaction::UsedAsArgument {
            callee_function_id, ..
        } => {
            if let Some(id) = callee_function_id {
                m.insert("calleeFunctionId".into(), json!(id.0));
            }
        }
        Interaction::Operator { operator, .. } => {
            if let Some(op) = operator {
                m.insert("operator".into(), json!(op));
            }
        }
    }
    if let Some(ci) = i.call_index() {
        m.insert("callIndex".into(), json!(ci));
    }
    Value::Object(m)
}

/// Canonical JSON for a trace: keys sorted, two-space indentation,
/// trailing newline. Equal traces always produce identical bytes.
pub fn save_trace(trace: &Trace) -> String {
    let mut functions = Map::new();
    for (id, c) in &trace.functions {
        let mut args = Map::new();
        for (index, a) in &c.args {
            let mut am = Map::new();
            am.insert("argumentName".into(), json!(a.argument_name));
            am.insert("argumentIndex".into(), json!(a.argument_index));
            am.insert(
                "interactions".into(),
                Value::Array(a.interactions.iter().map(interaction_json).collect()),
            );
            if let Some(fid) = &a.function_id {
                am.insert("functionId".into(), json!(fid.0));
            }
            args.insert(index.to_string(), Value::Object(am));
        }
        let invocations: Vec<Value> = c
            .invocations
            .iter()
            .map(|inv| {
                json!({
                    "argumentRuntimeTypes": inv
                        .argument_runtime_types
                        .iter()
                        .map(|t| t.to_string())
                        .collect::<Vec<_>>(),
                    "returnRuntimeType": inv.return_runtime_type.to_string(),
                })
            })
            .collect();
        let mut cm = Map::new();
        cm.insert("functionName".into(), json!(c.function_name));
        cm.insert("isExported".into(), json!(c.is_exported));
        cm.insert("isConstructor".into(), json!(c.is_constructor));
        if c.is_instance_method {
            cm.insert("isInstanceMethod".into(), json!(true));
        }
        cm.insert("requiredModule".into(), json!(c.required_module));
        cm.insert("args".into(), Value::Object(args));
        cm.insert("invocations".into(), Value::Array(invocations));
        functions.insert(id.0.clone(), Value::Object(cm));
    }
    let doc = json!({
        "schemaVersion": SCHEMA_VERSION,
        "functions": Value::Object(functions),
    });
    let mut out = serde_json::to_string_pretty(&doc).expect("trace JSON is always serializable");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const GET_FIELD: &str = r#"{
        "functionId_1": {
            "functionName": "foo",
            "args": {
                "0": {
                    "argumentName": "hello",
                    "interactions": [
                        {"code": "getField", "field": "world",
                         "followingInteractions": [], "returnTypeOf": "string"}
                    ]
                }
            }
        }
    }"#;

    const METHOD_CALL: &str = r#"{
        "functionId_1": {
            "functionName": "foo",
            "args": {
                "0": {
                    "argumentName": "bar",
                    "interactions": [
                        {"code": "methodCall", "methodName": "hello", "functionId": "functionId_2",
                         "followingInteractions": [
                            {"code": "getField", "field": "world",
                             "followingInteractions": [], "returnTypeOf": "string"}
                         ]}
                    ]
                }
            }
        },
        "functionId_2": {"functionName": "hello"}
    }"#;

    #[test]
    fn loads_the_get_field_listing() {
        let t = load_trace(GET_FIELD).unwrap();
        assert_eq!(t.functions.len(), 1);
        let c = &t.functions[&FunctionId::from("functionId_1")];
        assert_eq!(c.function_name, "foo");
        let arg = &c.args[&0];
        assert_eq!(arg.argument_name, "hello");
        assert_eq!(
            arg.interactions,
            vec![Interaction::get_field("world", RuntimeType::of(RuntimeKind::String))]
        );
    }

    #[test]
    fn loads_the_method_call_listing() {
        let t = load_trace(METHOD_CALL).unwrap();
        let arg = &t.functions[&FunctionId::from("functionId_1")].args[&0];
        assert_eq!(arg.argument_name, "bar");
        match &arg.interactions[0] {
            Interaction::MethodCall {
                method_name,
                function_id,
                following,
                ..
            } => {
                assert_eq!(method_name, "hello");
                assert_eq!(function_id.as_ref().unwrap().0, "functionId_2");
                assert_eq!(
                    following,
                    &vec![Interaction::get_field(
                        "world",
                        RuntimeType::of(RuntimeKind::String)
                    )]
                );
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_object_is_an_empty_trace() {
        assert!(load_trace("{}").unwrap().is_empty());
        let saved = save_trace(&Trace::default());
        assert_eq!(saved, "{\n  \"functions\": {},\n  \"schemaVersion\": 1\n}\n");
        assert!(load_trace(&saved).unwrap().is_empty());
    }

    #[test]
    fn listings_round_trip() {
        for src in [GET_FIELD, METHOD_CALL] {
            let t = load_trace(src).unwrap();
            let saved = save_trace(&t);
            assert_eq!(load_trace(&saved).unwrap(), t);
            assert_eq!(save_trace(&load_trace(&saved).unwrap()), saved);
        }
    }

    #[test]
    fn rejects_unknown_codes() {
        let src = r#"{"f": {"args": {"0": {"interactions": [{"code": "setField"}]}}}}"#;
        assert!(matches!(
            load_trace(src),
            Err(TraceError::UnknownInteraction { code, .. }) if code == "setField"
        ));
    }

    #[test]
    fn rejects_dangling_function_ids() {
        let src = r#"{"f": {"args": {"0": {"interactions": [
            {"code": "methodCall", "methodName": "m", "functionId": "nope"}]}}}}"#;
        assert!(matches!(
            load_trace(src),
            Err(TraceError::DanglingFunctionId { id, .. }) if id == "nope"
        ));
    }

    #[test]
    fn rejects_cyclic_method_chains() {
        let src = r#"{"a": {"args": {"0": {"interactions": [
            {"code": "methodCall", "methodName": "m", "functionId": "b", "followingInteractions": [
                {"code": "methodCall", "methodName": "m", "functionId": "b"}]}]}}},
            "b": {}}"#;
        assert!(matches!(
            load_trace(src),
            Err(TraceError::CyclicInteractions { .. })
        ));
    }

    #[test]
    fn rejects_overly_deep_nesting() {
        let mut inner = String::from(r#"{"code":"getField","field":"x","returnTypeOf":"string"}"#);
        for _ in 0..MAX_INTERACTION_DEPTH {
            inner = format!(
                r#"{{"code":"getField","field":"x","returnTypeOf":"object","followingInteractions":[{inner}]}}"#
            );
        }
        let src = format!(r#"{{"a": {{"args": {{"0": {{"interactions": [{inner}]}}}}}}}}"#);
        assert!(matches!(
            load_trace(&src),
            Err(TraceError::CyclicInteractions { .. })
        ));
    }

    #[test]
    fn rejects_fields_irrelevant_to_the_code() {
        let src = r#"{"a": {"args": {"0": {"interactions": [
            {"code": "getField", "field": "x", "returnTypeOf": "string", "methodName": "m"}]}}}}"#;
        assert!(matches!(load_trace(src), Err(TraceError::Invalid { .. })));
    }

    #[test]
    fn rejects_mismatched_argument_index_and_ragged_invocations() {
        let src = r#"{"a": {"args": {"0": {"argumentIndex": 1}}}}"#;
        assert!(load_trace(src).is_err());
        let src = r#"{"a": {"invocations": [
            {"argumentRuntimeTypes": ["string"], "returnRuntimeType": "string"},
            {"argumentRuntimeTypes": [], "returnRuntimeType": "string"}]}}"#;
        assert!(load_trace(src).is_err());
    }

    #[test]
    fn rejects_wrong_schema_version_and_bad_json() {
        assert!(matches!(
            load_trace(r#"{"schemaVersion": 2, "functions": {}}"#),
            Err(TraceError::SchemaVersion(_))
        ));
        assert!(matches!(load_trace("{"), Err(TraceError::Json(_))));
    }

    #[test]
    fn accepts_operator_events() {
        let src = r#"{"a": {"args": {"0": {"interactions": [
            {"code": "binaryOperation", "operator": "=="},
            {"code": "unaryOperation", "operator": "typeof"}]}}}}"#;
        let t = load_trace(src).unwrap();
        assert_eq!(t.functions[&FunctionId::from("a")].args[&0].interactions.len(), 2);
    }

    #[test]
    fn runtime_types_encode_as_strings() {
        for s in ["string", "object", "RegExp", "string[]", "array", "Date[]", "null"] {
            let t: RuntimeType = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
        assert_eq!("RegExp".parse::<RuntimeType>().unwrap().kind, RuntimeKind::Object);
        assert!("symbol".parse::<RuntimeType>().is_err());
    }

    #[test]
    fn function_ids_sort_naturally() {
        let mut ids: Vec<FunctionId> = ["functionId_10", "functionId_2", "functionId_1"]
            .into_iter()
            .map(FunctionId::from)
            .collect();
        ids.sort();
        let names: Vec<_> = ids.iter().map(|i| i.0.as_str()).collect();
        assert_eq!(names, ["functionId_1", "functionId_2", "functionId_10"]);
    }

    #[test]
    fn merge_combines_matching_containers_and_offsets_call_indices() {
        let src = r#"{"functionId_1": {"functionName": "f", "isExported": true, "requiredModule": "m",
            "args": {"0": {"argumentName": "o", "interactions": [
                {"code": "getField", "field": "a", "returnTypeOf": "string", "callIndex": 0}]}},
            "invocations": [{"argumentRuntimeTypes": ["object"], "returnRuntimeType": "undefined"}]}}"#;
        let one = load_trace(src).unwrap();
        let mut both = one.clone();
        both.merge(&one);
        assert_eq!(both.functions.len(), 1);
        let c = both.functions.values().next().unwrap();
        assert_eq!(c.invocations.len(), 2);
        let indices: Vec<_> = c.args[&0]
            .interactions
            .iter()
            .map(|i| i.call_index())
            .collect();
        assert_eq!(indices, [Some(0), Some(1)]);
        // The merged trace is still valid.
        load_trace(&save_trace(&both)).unwrap();
    }

    #[test]
    fn merge_renames_colliding_ids_and_pads_arity() {
        let a = load_trace(
            r#"{"functionId_1": {"functionName": "f", "requiredModule": "m",
                "invocations": [{"argumentRuntimeTypes": ["string"], "returnRuntimeType": "string"}]}}"#,
        )
        .unwrap();
        let b = load_trace(
            r#"{"functionId_1": {"functionName": "g", "requiredModule": "m",
                "invocations": [{"argumentRuntimeTypes": [], "returnRuntimeType": "string"}]},
                "functionId_2": {"functionName": "f", "requiredModule": "m",
                "invocations": [{"argumentRuntimeTypes": ["string", "number"], "returnRuntimeType": "string"}]}}"#,
        )
        .unwrap();
        let mut m = a.clone();
        m.merge(&b);
        assert_eq!(m.functions.len(), 2);
        let f = &m.functions[&FunctionId::from("functionId_1")];
        assert_eq!(f.arity(), 2);
        assert_eq!(f.invocations[0].argument_runtime_types[1], RuntimeType::undefined());
        assert_eq!(m.functions[&FunctionId::from("functionId_2")].function_name, "g");
    }
}
