//! Run settings: a TOML file, overridden by `DTSGEN_*` environment
//! variables, overridden by command-line flags.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Deserialize;
use thiserror::Error;

pub const DEFAULT_TRACER: &[&str] = &["node", "tracer.js"];
pub const DEFAULT_TRACER_TIMEOUT_SECS: u64 = 60;

#[derive(Debug, Error)]
pub enum SettingsError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config {path}: {source}")]
    Toml {
        path: PathBuf,
        #[source]
        source: toml::de::Error,
    },
    #[error("invalid value `{value}` for {key}")]
    Value { key: &'static str, value: String },
}

/// Everything optional, so file, environment and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub struct Settings {
    pub registry: Option<String>,
    pub raw_base: Option<String>,
    pub fixtures: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub depth_limit: Option<usize>,
    /// Program and leading arguments; the example path, module name and
    /// output path are appended.
    pub tracer: Option<Vec<String>>,
    pub tracer_timeout_secs: Option<u64>,
    /// Where examples and traces are written and the tracer runs. A fresh
    /// temporary directory when unset.
    pub work_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self, SettingsError> {
        let text = std::fs::read_to_string(path).map_err(|source| SettingsError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        toml::from_str(&text).map_err(|source| SettingsError::Toml {
            path: path.to_path_buf(),
            source,
        })
    }

    /// Applies `DTSGEN_*` variables from `env`.
    pub fn apply_env(&mut self, env: &HashMap<String, String>) -> Result<(), SettingsError> {
        let get = |k: &str| env.get(k).filter(|v| !v.is_empty()).cloned();
        if let Some(v) = get("DTSGEN_REGISTRY") {
            self.registry = Some(v);
        }
        if let Some(v) = get("DTSGEN_RAW_BASE") {
            self.raw_base = Some(v);
        }
        if let Some(v) = get("DTSGEN_FIXTURES") {
            self.fixtures = Some(v.into());
        }
        if let Some(v) = get("DTSGEN_OUTPUT") {
            self.output = Some(v.into());
        }
        if let Some(v) = get("DTSGEN_WORK_DIR") {
            self.work_dir = Some(v.into());
        }
        if let Some(v) = get("DTSGEN_TRACER") {
            self.tracer = Some(v.split_whitespace().map(String::from).collect());
        }
        if let Some(v) = get("DTSGEN_DEPTH") {
            self.depth_limit = Some(parse_number("DTSGEN_DEPTH", &v)?);
        }
        if let Some(v) = get("DTSGEN_TRACER_TIMEOUT") {
            self.tracer_timeout_secs = Some(parse_number("DTSGEN_TRACER_TIMEOUT", &v)?);
        }
        if let Some(v) = get("DTSGEN_JOBS") {
            self.jobs = Some(parse_number("DTSGEN_JOBS", &v)?);
        }
        Ok(())
    }

    /// Values set in `other` win.
    pub fn overlay(&mut self, other: Settings) {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(
            registry,
            raw_base,
            fixtures,
            output,
            depth_limit,
            tracer,
            tracer_timeout_secs,
            work_dir,
            jobs
        );
    }

    pub fn tracer_command(&self) -> Vec<String> {
        match &self.tracer {
            Some(t) if !t.is_empty() => t.clone(),
            _ => DEFAULT_TRACER.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn tracer_timeout(&self) -> Duration {
        Duration::from_secs(self.tracer_timeout_secs.unwrap_or(DEFAULT_TRACER_TIMEOUT_SECS))
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output.clone().unwrap_or_else(|| PathBuf::from("output"))
    }
}

fn parse_number<T: std::str::FromStr>(key: &'static str, value: &str) -> Result<T, SettingsError> {
    value.trim().parse().map_err(|_| SettingsError::Value {
        key,
        value: value.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layers_file_env_and_flags() {
        let mut s: Settings = toml::from_str(
            "registry = \"http://file\"\ndepth_limit = 3\ntracer = [\"node\", \"t.js\"]\n",
        )
        .unwrap();
        let env = HashMap::from([
            ("DTSGEN_DEPTH".to_string(), "7".to_string()),
            ("DTSGEN_TRACER".to_string(), "deno run t.ts".to_string()),
        ]);
        s.apply_env(&env).unwrap();
        assert_eq!(s.registry.as_deref(), Some("http://file"));
        assert_eq!(s.depth_limit, Some(7));
        assert_eq!(s.tracer_command(), ["deno", "run", "t.ts"]);
        s.overlay(Settings {
            depth_limit: Some(2),
            ..Settings::default()
        });
        assert_eq!(s.depth_limit, Some(2));
        assert_eq!(s.registry.as_deref(), Some("http://file"));
    }

    #[test]
    fn rejects_bad_numbers_and_keys() {
        let env = HashMap::from([("DTSGEN_DEPTH".to_string(), "deep".to_string())]);
        assert!(Settings::default().apply_env(&env).is_err());
        assert!(toml::from_str::<Settings>("colour = 1").is_err());
    }

    #[test]
    fn defaults() {
        let s = Settings::default();
        assert_eq!(s.tracer_command(), ["node", "tracer.js"]);
        assert_eq!(s.output_dir(), PathBuf::from("output"));
        assert_eq!(s.tracer_timeout(), Duration::from_secs(60));
    }
}
