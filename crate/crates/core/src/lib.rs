//! Generates TypeScript declaration files from recorded run-time traces,
//! and parses and compares declaration files.

pub mod compare;
pub mod emit;
pub mod harvest;
pub mod infer;
pub mod model;
pub mod naming;
pub mod parse;
pub mod trace;
pub mod types;

pub use model::{
    normalize, tag_features, ClassDecl, DeclarationModule, FeatureTag, FunctionDecl,
    InterfaceDecl, Scope, TemplateKind,
};
pub use trace::{load_trace, save_trace, Trace, TraceError};
pub use types::{ObjectShape, Param, Property, Signature, TsType};
pub use compare::{compare, compare_sources, ComparisonReport, Difference, DifferenceKind, Solvability};
pub use emit::emit;
pub use harvest::{extract_code_examples, CodeExample};
pub use infer::{infer_module, InferenceConfig, InferenceError};
pub use parse::{expand_aliases, parse, parse_module, ParseError};
