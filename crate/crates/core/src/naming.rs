//! Identifier conventions for generated files.

/// Turns a package name into an UpperCamelCase identifier:
/// `glob-to-regexp` becomes `GlobToRegexp`. Any non-alphanumeric
/// character separates segments, so scoped names work too.
pub fn camelize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    for segment in name.split(|c: char| !c.is_ascii_alphanumeric()) {
        let mut chars = segment.chars();
        if let Some(head) = chars.next() {
            out.push(head.to_ascii_uppercase());
            out.extend(chars);
        }
    }
    if out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

/// Lowercased identifier with separators removed. Two export names are
/// considered the same when their folded forms match.
pub fn fold_identifier(name: &str) -> String {
    name.chars()
        .filter(|c| c.is_ascii_alphanumeric())
        .map(|c| c.to_ascii_lowercase())
        .collect()
}

/// Normalizes a `require` specifier or package name so that
/// `./greet-settings-module.js` and `greet-settings-module` match.
pub fn normalize_module_specifier(spec: &str) -> &str {
    let mut s = spec.trim();
    loop {
        if let Some(rest) = s.strip_prefix("./") {
            s = rest;
        } else if let Some(rest) = s.strip_prefix("../") {
            s = rest;
        } else {
            break;
        }
    }
    for suffix in ["/index.js", "/index", ".js", ".cjs", ".mjs"] {
        if let Some(rest) = s.strip_suffix(suffix) {
            s = rest;
            break;
        }
    }
    s
}
