//! Independent merge oracle: explores every sequence of pairwise merges
//! over a small type universe and collects the terminal states.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use dtsgen_core::infer::CandidateSignature;
use dtsgen_core::types::{ObjectShape, Property, TsType};

/// A union over the universe: primitive flags plus at most one object
/// shape whose properties map to (type, optional).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OType {
    pub string: bool,
    pub number: bool,
    pub shape: Option<BTreeMap<String, (OType, bool)>>,
}

impl OType {
    fn prim(string: bool, number: bool) -> Self {
        OType {
            string,
            number,
            shape: None,
        }
    }

    fn object(props: &[(&str, OType)]) -> Self {
        OType {
            string: false,
            number: false,
            shape: Some(
                props
                    .iter()
                    .map(|(n, t)| (n.to_string(), (t.clone(), false)))
                    .collect(),
            ),
        }
    }

    pub fn join(&self, other: &OType) -> OType {
        let shape = match (&self.shape, &other.shape) {
            (None, None) => None,
            (Some(s), None) | (None, Some(s)) => Some(s.clone()),
            (Some(a), Some(b)) => {
                let names: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
                Some(
                    names
                        .into_iter()
                        .map(|n| {
                            let v = match (a.get(n), b.get(n)) {
                                (Some((ta, oa)), Some((tb, ob))) => (ta.join(tb), *oa || *ob),
                                (Some((t, _)), None) | (None, Some((t, _))) => (t.clone(), true),
                                (None, None) => unreachable!(),
                            };
                            (n.clone(), v)
                        })
                        .collect(),
                )
            }
        };
        OType {
            string: self.string || other.string,
            number: self.number || other.number,
            shape,
        }
    }

    /// Reads a type built by the implementation back into the oracle form.
    pub fn from_ts(t: &TsType) -> Option<OType> {
        let mut out = OType::prim(false, false);
        for m in t.members() {
            match m {
                TsType::String if !out.string => out.string = true,
                TsType::Number if !out.number => out.number = true,
                TsType::Shape(s) if out.shape.is_none() => {
                    let mut props = BTreeMap::new();
                    for p in &s.properties {
                        let prev = props.insert(p.name.clone(), (OType::from_ts(&p.ty)?, p.optional));
                        if prev.is_some() {
                            return None;
                        }
                    }
                    out.shape = Some(props);
                }
                _ => return None,
            }
        }
        Some(out)
    }
}

/// The four universe members, as oracle types and as model types.
pub fn universe() -> Vec<(OType, TsType)> {
    let shape = |name: &str, ty: TsType| {
        TsType::Shape(ObjectShape {
            properties: vec![Property::new(name, ty)],
            ..Default::default()
        })
    };
    vec![
        (OType::prim(true, false), TsType::String),
        (OType::prim(false, true), TsType::Number),
        (
            OType::object(&[("x", OType::prim(true, false))]),
            shape("x", TsType::String),
        ),
        (
            OType::object(&[("y", OType::prim(false, true))]),
            shape("y", TsType::Number),
        ),
    ]
}

/// A candidate as universe indices: parameter types then return type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cand {
    pub params: Vec<OType>,
    pub ret: usize,
}

pub fn to_candidate(params: &[usize], ret: usize, universe: &[(OType, TsType)]) -> CandidateSignature {
    CandidateSignature {
        params: params
            .iter()
            .enumerate()
            .map(|(i, &t)| (format!("p{i}"), universe[t].1.clone()))
            .collect(),
        ret: universe[ret].1.clone(),
    }
}

pub fn to_oracle(params: &[usize], ret: usize, universe: &[(OType, TsType)]) -> Cand {
    Cand {
        params: params.iter().map(|&t| universe[t].0.clone()).collect(),
        ret,
    }
}

/// Reads a merge result back into a sorted oracle state, using the
/// universe to map return types to indices.
pub fn read_result(out: &[CandidateSignature], universe: &[(OType, TsType)]) -> Option<Vec<Cand>> {
    let mut state = Vec::new();
    for c in out {
        let ret = universe.iter().position(|(_, t)| *t == c.ret)?;
        let params = c
            .params
            .iter()
            .map(|(_, t)| OType::from_ts(t))
            .collect::<Option<Vec<_>>>()?;
        state.push(Cand { params, ret });
    }
    state.sort();
    Some(state)
}

/// Every terminal state reachable by merging any two candidates with equal
/// arity and equal return type, in any order, until none remain.
pub fn terminal_states(start: Vec<Cand>) -> BTreeSet<Vec<Cand>> {
    let mut terminals = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![sorted(start)];
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let mut moved = false;
        for i in 0..state.len() {
            for j in i + 1..state.len() {
                let (a, b) = (&state[i], &state[j]);
                if a.ret != b.ret || a.params.len() != b.params.len() {
                    continue;
                }
                moved = true;
                let merged = Cand {
                    params: a.params.iter().zip(&b.params).map(|(x, y)| x.join(y)).collect(),
                    ret: a.ret,
                };
                let mut next: Vec<Cand> = state
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != i && *k != j)
                    .map(|(_, c)| c.clone())
                    .collect();
                next.push(merged);
                stack.push(sorted(next));
            }
        }
        if !moved {
            terminals.insert(state);
        }
    }
    terminals
}

fn sorted(mut v: Vec<Cand>) -> Vec<Cand> {
    v.sort();
    v
}

/// Steps `keys` to the next lexicographic permutation, applying the same
/// swaps to `items`. Returns false after the last permutation.
pub fn next_permutation<K: Ord, T>(keys: &mut [K], items: &mut [T]) -> bool {
    let Some(i) = (0..keys.len().saturating_sub(1))
        .rev()
        .find(|&i| keys[i] < keys[i + 1])
    else {
        return false;
    };
    let j = (i + 1..keys.len()).rev().find(|&j| keys[i] < keys[j]).unwrap();
    keys.swap(i, j);
    items.swap(i, j);
    keys[i + 1..].reverse();
    items[i + 1..].reverse();
    true
}
