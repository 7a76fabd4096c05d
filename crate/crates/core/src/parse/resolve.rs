//! Name resolution and alias expansion over a parsed scope tree.

use std::collections::{BTreeMap, BTreeSet};

use super::ParseError;
use crate::model::{tag_features, DeclarationModule, FunctionDecl, InterfaceDecl, Scope, TypeAlias};
use crate::types::{ObjectShape, Signature, TsType};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Interface,
    Class,
    Alias,
}

/// The names declared at each level, detached from the scope so that types
/// can be rewritten while looking names up.
#[derive(Default)]
struct Index {
    names: BTreeMap<String, Kind>,
    children: BTreeMap<String, Index>,
}

impl Index {
    fn build(scope: &Scope) -> Index {
        let mut names = BTreeMap::new();
        for a in &scope.aliases {
            names.insert(a.name.clone(), Kind::Alias);
        }
        for c in &scope.classes {
            names.insert(c.name.clone(), Kind::Class);
        }
        for i in &scope.interfaces {
            names.insert(i.name.clone(), Kind::Interface);
        }
        Index {
            names,
            children: scope
                .namespaces
                .iter()
                .map(|(k, v)| (k.clone(), Index::build(v)))
                .collect(),
        }
    }

    fn at(&self, path: &[String]) -> Option<&Index> {
        let mut node = self;
        for p in path {
            node = node.children.get(p)?;
        }
        Some(node)
    }

    /// Looks `name` up from the scope at `path`, innermost scope first.
    fn lookup(&self, path: &[String], name: &str) -> Option<(String, Kind)> {
        let segs: Vec<&str> = name.split('.').collect();
        let (last, prefix) = segs.split_last()?;
        for k in (0..=path.len()).rev() {
            let Some(mut node) = self.at(&path[..k]) else {
                continue;
            };
            let mut found = true;
            for s in prefix {
                match node.children.get(*s) {
                    Some(n) => node = n,
                    None => {
                        found = false;
                        break;
                    }
                }
            }
            if !found {
                continue;
            }
            if let Some(kind) = node.names.get(*last) {
                let mut full: Vec<&str> = path[..k].iter().map(String::as_str).collect();
                full.extend(&segs);
                return Some((full.join("."), *kind));
            }
        }
        None
    }
}

fn collect_sig_params(sig: &Signature, out: &mut BTreeSet<String>) {
    out.extend(sig.type_params.iter().cloned());
    sig.walk_types(&mut |t| {
        if let TsType::Callback(s) = t {
            out.extend(s.type_params.iter().cloned());
        }
    });
}

fn resolver<'a>(
    index: &'a Index,
    path: &'a [String],
    bound: BTreeSet<String>,
) -> impl FnMut(TsType) -> TsType + 'a {
    move |t| match t {
        TsType::Named(n) if !bound.contains(&n) => match index.lookup(path, &n) {
            Some((full, Kind::Interface)) => TsType::InterfaceRef(full),
            Some((full, _)) => TsType::Named(full),
            None => TsType::Named(n),
        },
        TsType::Generic { name, args } if !bound.contains(&name) => {
            match index.lookup(path, &name) {
                Some((full, _)) => TsType::Generic { name: full, args },
                None => TsType::Generic { name, args },
            }
        }
        other => other,
    }
}

fn resolve_scope(scope: &mut Scope, index: &Index, path: &mut Vec<String>) {
    for f in &mut scope.functions {
        for sig in &mut f.overloads {
            let mut bound = BTreeSet::new();
            collect_sig_params(sig, &mut bound);
            *sig = std::mem::take(sig).map_types(&mut resolver(index, path, bound));
        }
    }
    for c in &mut scope.classes {
        let mut bound: BTreeSet<String> = c.type_params.iter().cloned().collect();
        for sig in c.constructors.iter().chain(c.methods.iter().flat_map(|m| &m.overloads)) {
            collect_sig_params(sig, &mut bound);
        }
        let mut f = resolver(index, path, bound);
        for sig in c
            .constructors
            .iter_mut()
            .chain(c.methods.iter_mut().flat_map(|m| m.overloads.iter_mut()))
        {
            *sig = std::mem::take(sig).map_types(&mut f);
        }
        for p in &mut c.properties {
            p.ty = std::mem::replace(&mut p.ty, TsType::Never).map(&mut f);
        }
    }
    for i in &mut scope.interfaces {
        let mut bound: BTreeSet<String> = i.type_params.iter().cloned().collect();
        i.shape.walk_types(&mut |t| {
            if let TsType::Callback(s) = t {
                bound.extend(s.type_params.iter().cloned());
            }
        });
        for s in i.shape.call_signatures.iter().chain(&i.shape.construct_signatures) {
            collect_sig_params(s, &mut bound);
        }
        let mut f = resolver(index, path, bound);
        i.extends = std::mem::take(&mut i.extends)
            .into_iter()
            .map(|t| t.map(&mut f))
            .collect();
        i.shape = std::mem::take(&mut i.shape).map_types(&mut f);
    }
    for a in &mut scope.aliases {
        let mut bound: BTreeSet<String> = a.type_params.iter().cloned().collect();
        a.ty.walk(&mut |t| {
            if let TsType::Callback(s) = t {
                bound.extend(s.type_params.iter().cloned());
            }
        });
        a.ty = std::mem::replace(&mut a.ty, TsType::Never).map(&mut resolver(index, path, bound));
    }
    for v in &mut scope.variables {
        v.ty = v
            .ty
            .take()
            .map(|t| t.map(&mut resolver(index, path, BTreeSet::new())));
    }
    for (name, ns) in &mut scope.namespaces {
        path.push(name.clone());
        resolve_scope(ns, index, path);
        path.pop();
    }
}

/// Qualifies references to declared interfaces, aliases and classes with
/// their full path from the file root. Interfaces become `InterfaceRef`s.
pub(crate) fn resolve_references(scope: &mut Scope) {
    let index = Index::build(scope);
    resolve_scope(scope, &index, &mut Vec::new());
}

/// Drops the `ns.` prefix after a namespace was flattened into the root.
pub(crate) fn requalify(scope: &mut Scope, ns: &str) {
    let prefix = format!("{ns}.");
    scope.map_types(&mut |t| match t {
        TsType::InterfaceRef(n) if n.starts_with(&prefix) => {
            TsType::InterfaceRef(n[prefix.len()..].to_string())
        }
        TsType::Named(n) if n.starts_with(&prefix) => TsType::Named(n[prefix.len()..].to_string()),
        TsType::Generic { name, args } if name.starts_with(&prefix) => TsType::Generic {
            name: name[prefix.len()..].to_string(),
            args,
        },
        other => other,
    });
}

fn collect_aliases(scope: &Scope, path: &str, out: &mut BTreeMap<String, TypeAlias>) {
    for a in &scope.aliases {
        out.insert(qualify(path, &a.name), a.clone());
    }
    for (name, ns) in &scope.namespaces {
        collect_aliases(ns, &qualify(path, name), out);
    }
}

fn qualify(path: &str, name: &str) -> String {
    if path.is_empty() {
        name.to_string()
    } else {
        format!("{path}.{name}")
    }
}

struct Expander<'a> {
    aliases: &'a BTreeMap<String, TypeAlias>,
    index: &'a Index,
    error: Option<ParseError>,
}

impl Expander<'_> {
    fn expand(&mut self, t: TsType, stack: &mut Vec<String>) -> TsType {
        t.map(&mut |t| self.step(t, stack))
    }

    fn step(&mut self, t: TsType, stack: &mut Vec<String>) -> TsType {
        if self.error.is_some() {
            return t;
        }
        let (name, args) = match &t {
            TsType::Named(n) => (n.clone(), Vec::new()),
            TsType::Generic { name, args } => (name.clone(), args.clone()),
            _ => return t,
        };
        let Some(alias) = self.aliases.get(&name) else {
            if let Some((ns, _)) = name.rsplit_once('.') {
                let path: Vec<String> = ns.split('.').map(str::to_string).collect();
                if self.index.at(&path).is_some() && self.index.lookup(&[], &name).is_none() {
                    self.error = Some(ParseError::UnresolvedName(name));
                }
            }
            return t;
        };
        if stack.contains(&name) {
            self.error = Some(ParseError::CyclicAlias(name));
            return t;
        }
        let subst: BTreeMap<&str, TsType> = alias
            .type_params
            .iter()
            .map(String::as_str)
            .zip(args)
            .collect();
        let body = alias.ty.clone().map(&mut |t| match t {
            TsType::Named(n) if subst.contains_key(n.as_str()) => subst[n.as_str()].clone(),
            other => other,
        });
        stack.push(name);
        let out = self.expand(body, stack);
        stack.pop();
        out
    }
}

/// Moves object-literal parameter types of functions into interfaces so
/// they line up with generated declarations.
fn hoist_literals(scope: &mut Scope, path: &str) {
    let mut new_interfaces = Vec::new();
    let hoist = |f: &mut FunctionDecl, new_interfaces: &mut Vec<InterfaceDecl>| {
        let single = f.overloads.len() == 1;
        for (k, sig) in f.overloads.iter_mut().enumerate() {
            for p in &mut sig.params {
                let base = if single {
                    format!("__literal_{}_{}", f.name, p.name)
                } else {
                    format!("__literal_{}{}_{}", f.name, k + 1, p.name)
                };
                let mut lift = |shape: ObjectShape, n: usize| {
                    let name = if n == 0 { base.clone() } else { format!("{base}{}", n + 1) };
                    new_interfaces.push(InterfaceDecl {
                        name: name.clone(),
                        shape,
                        ..Default::default()
                    });
                    TsType::InterfaceRef(qualify(path, &name))
                };
                p.ty = match std::mem::replace(&mut p.ty, TsType::Never) {
                    TsType::Shape(s) => lift(s, 0),
                    TsType::Union(ms) => {
                        let mut n = 0;
                        TsType::union(ms.into_iter().map(|m| match m {
                            TsType::Shape(s) => {
                                n += 1;
                                lift(s, n - 1)
                            }
                            other => other,
                        }))
                    }
                    other => other,
                };
            }
        }
    };
    for f in &mut scope.functions {
        hoist(f, &mut new_interfaces);
    }
    scope.interfaces.extend(new_interfaces);
    let names: Vec<String> = scope.namespaces.keys().cloned().collect();
    for name in names {
        let ns = scope.namespaces.get_mut(&name).unwrap();
        hoist_literals(ns, &qualify(path, &name));
    }
}

fn finish_scope(scope: &mut Scope) {
    scope.aliases.clear();
    for c in &mut scope.classes {
        let props = std::mem::take(&mut c.properties);
        for p in props {
            match p.ty {
                TsType::Callback(sig) => {
                    match c
                        .methods
                        .iter_mut()
                        .find(|m| m.name == p.name && m.modifiers.is_static == p.modifiers.is_static)
                    {
                        Some(m) => m.overloads.push(*sig),
                        None => c.methods.push(FunctionDecl {
                            name: p.name,
                            overloads: vec![*sig],
                            modifiers: p.modifiers,
                        }),
                    }
                }
                _ => c.properties.push(p),
            }
        }
    }
    for i in &mut scope.interfaces {
        for p in &mut i.shape.properties {
            if matches!(p.ty, TsType::Callback(_)) {
                p.method = true;
            }
        }
    }
    for ns in scope.namespaces.values_mut() {
        finish_scope(ns);
    }
}

/// Replaces every alias reference with the aliased type, then removes the
/// aliases. Function-typed class properties become methods and object
/// literal parameters become interfaces.
pub fn expand_aliases(mut module: DeclarationModule) -> Result<DeclarationModule, ParseError> {
    let mut aliases = BTreeMap::new();
    collect_aliases(&module.scope, "", &mut aliases);
    let index = Index::build(&module.scope);
    let mut ex = Expander {
        aliases: &aliases,
        index: &index,
        error: None,
    };
    // Expand alias bodies too, so cycles between unused aliases surface.
    for name in aliases.keys() {
        ex.expand(TsType::Named(name.clone()), &mut Vec::new());
    }
    module.scope.map_types(&mut |t| {
        if ex.error.is_some() {
            return t;
        }
        match t {
            TsType::Named(_) | TsType::Generic { .. } => ex.step(t, &mut Vec::new()),
            other => other,
        }
    });
    if let Some(err) = ex.error {
        return Err(err);
    }
    hoist_literals(&mut module.scope, "");
    finish_scope(&mut module.scope);
    module.feature_tags = tag_features(&module);
    Ok(module)
}
