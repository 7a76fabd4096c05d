#![allow(dead_code)]

pub mod ast;
pub mod merge_oracle;

use std::path::PathBuf;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn read_fixture(package: &str, file: &str) -> String {
    let path = fixtures_dir().join(package).join(file);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Packages with a recorded trace and a transcribed generated figure.
pub const GOLDEN: &[&str] = &[
    "abs",
    "glob-to-regexp",
    "greet-settings-module",
    "greet-module",
    "greet-classes-module",
    "is-uuid",
    "dirname-regex",
    "escape-html",
    "github-url-to-object",
    "steamid",
    "glob-base",
    "smart-truncate",
];

/// Drops `//` comments and collapses whitespace.
pub fn normalize_text(src: &str) -> String {
    src.lines()
        .map(|l| match l.find("//") {
            Some(i) => &l[..i],
            None => l,
        })
        .flat_map(str::split_whitespace)
        .collect::<Vec<_>>()
        .join(" ")
}
