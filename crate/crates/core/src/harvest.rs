//! Finding example code for a package: repository lookup, README fetch and
//! code block extraction.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use pulldown_cmark::{CodeBlockKind, Event, Parser, Tag, TagEnd};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// README names tried in order.
pub const README_VARIANTS: &[&str] = &[
    "README.md",
    "readme.md",
    "Readme.md",
    "README.markdown",
    "readme.markdown",
    "README",
    "readme",
];

#[derive(Debug, Error)]
pub enum HarvestError {
    #[error("package name is empty")]
    EmptyPackageName,
    #[error("package `{0}` not found")]
    UnknownPackage(String),
    #[error("cannot fetch {what}: {message}")]
    Fetch { what: String, message: String },
    #[error("malformed metadata for `{package}`: {message}")]
    Metadata { package: String, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PackageSource {
    pub package_name: String,
    pub repository_url: Option<String>,
    pub readme_text: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CodeExample {
    pub index: usize,
    pub language_tag: String,
    pub body: String,
}

/// Package metadata lookup, e.g. the npm registry.
pub trait MetadataFetcher {
    /// The package's repository URL, or `None` when the metadata has no
    /// repository entry.
    fn repository_url(&self, package: &str) -> Result<Option<String>, HarvestError>;
}

/// Raw file access in a repository. `Ok(None)` means the file does not exist.
pub trait FileFetcher {
    fn fetch(&self, repo: &str, file: &str) -> Result<Option<String>, HarvestError>;
}

pub fn resolve_repository(
    package: &str,
    fetcher: &dyn MetadataFetcher,
) -> Result<Option<String>, HarvestError> {
    if package.trim().is_empty() {
        return Err(HarvestError::EmptyPackageName);
    }
    fetcher.repository_url(package)
}

pub fn fetch_readme(repo: &str, fetcher: &dyn FileFetcher) -> Result<Option<String>, HarvestError> {
    for name in README_VARIANTS {
        if let Some(text) = fetcher.fetch(repo, name)? {
            return Ok(Some(text));
        }
    }
    Ok(None)
}

/// Resolves the repository and fetches its README.
pub fn package_source(
    package: &str,
    metadata: &dyn MetadataFetcher,
    files: &dyn FileFetcher,
) -> Result<PackageSource, HarvestError> {
    let repository_url = resolve_repository(package, metadata)?;
    let readme_text = match &repository_url {
        Some(url) => fetch_readme(url, files)?,
        None => None,
    };
    Ok(PackageSource {
        package_name: package.to_string(),
        repository_url,
        readme_text,
    })
}

fn is_js_tag(info: &str) -> Option<String> {
    let tag = info.split_whitespace().next()?;
    // `js{1,3}` and `js,` style suffixes still name the language.
    let tag = tag
        .split(|c: char| !c.is_ascii_alphanumeric())
        .next()
        .unwrap_or_default();
    let lower = tag.to_ascii_lowercase();
    (lower == "js" || lower == "javascript").then(|| tag.to_string())
}

/// Bodies of the backtick-fenced blocks tagged `js` or `javascript`, in
/// document order.
pub fn extract_code_examples(markdown: &str) -> Vec<CodeExample> {
    let mut out = Vec::new();
    let mut current: Option<(String, String)> = None;
    for (event, range) in Parser::new(markdown).into_offset_iter() {
        match event {
            Event::Start(Tag::CodeBlock(CodeBlockKind::Fenced(info))) => {
                let fence = markdown[range.start..].trim_start();
                if !fence.starts_with("```") {
                    continue;
                }
                if let Some(tag) = is_js_tag(&info) {
                    current = Some((tag, String::new()));
                }
            }
            Event::Text(text) => {
                if let Some((_, body)) = current.as_mut() {
                    body.push_str(&text);
                }
            }
            Event::End(TagEnd::CodeBlock) => {
                if let Some((language_tag, body)) = current.take() {
                    out.push(CodeExample {
                        index: out.len(),
                        language_tag,
                        body,
                    });
                }
            }
            _ => {}
        }
    }
    out
}

/// Offline fetcher over `<root>/<package>/meta.json` and the README files
/// beside it.
#[derive(Debug, Clone)]
pub struct FixtureFetcher {
    root: PathBuf,
}

#[derive(Deserialize)]
struct Meta {
    #[serde(default)]
    repository: Option<RepositoryField>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RepositoryField {
    Url(String),
    Object { url: Option<String> },
}

impl RepositoryField {
    fn url(self) -> Option<String> {
        match self {
            RepositoryField::Url(u) => Some(u),
            RepositoryField::Object { url } => url,
        }
    }
}

/// Reads the `repository` entry from package metadata JSON, either the
/// string form or `{ "url": ... }`.
pub fn repository_from_metadata(package: &str, json: &str) -> Result<Option<String>, HarvestError> {
    let meta: Meta = serde_json::from_str(json).map_err(|e| HarvestError::Metadata {
        package: package.to_string(),
        message: e.to_string(),
    })?;
    Ok(meta
        .repository
        .and_then(RepositoryField::url)
        .filter(|u| !u.trim().is_empty()))
}

fn read_optional(path: &Path) -> Result<Option<String>, HarvestError> {
    match fs::read_to_string(path) {
        Ok(s) => Ok(Some(s)),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(HarvestError::Io {
            path: path.to_path_buf(),
            source,
        }),
    }
}

impl FixtureFetcher {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        FixtureFetcher { root: root.into() }
    }

    pub fn package_dir(&self, package: &str) -> PathBuf {
        self.root.join(package.replace('/', "__"))
    }

    /// The fixture directory whose metadata names `repo`, or `repo` itself
    /// when it is a local directory.
    fn repo_dir(&self, repo: &str) -> Result<Option<PathBuf>, HarvestError> {
        let local = Path::new(repo);
        if local.is_dir() {
            return Ok(Some(local.to_path_buf()));
        }
        let entries = fs::read_dir(&self.root).map_err(|source| HarvestError::Io {
            path: self.root.clone(),
            source,
        })?;
        let mut dirs: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).collect();
        dirs.sort();
        for dir in dirs {
            let Some(json) = read_optional(&dir.join("meta.json"))? else {
                continue;
            };
            let name = dir.file_name().unwrap_or_default().to_string_lossy().into_owned();
            if repository_from_metadata(&name, &json)?.as_deref() == Some(repo) {
                return Ok(Some(dir));
            }
        }
        Ok(None)
    }
}

impl MetadataFetcher for FixtureFetcher {
    fn repository_url(&self, package: &str) -> Result<Option<String>, HarvestError> {
        match read_optional(&self.package_dir(package).join("meta.json"))? {
            Some(json) => repository_from_metadata(package, &json),
            None => Err(HarvestError::UnknownPackage(package.to_string())),
        }
    }
}

impl FileFetcher for FixtureFetcher {
    fn fetch(&self, repo: &str, file: &str) -> Result<Option<String>, HarvestError> {
        let Some(dir) = self.repo_dir(repo)? else {
            return Err(HarvestError::Fetch {
                what: repo.to_string(),
                message: "no fixture names this repository".into(),
            });
        };
        // Exact-name match: a case-insensitive file system must not make
        // `readme.md` answer for `README.md`.
        let present = fs::read_dir(&dir)
            .map_err(|source| HarvestError::Io {
                path: dir.clone(),
                source,
            })?
            .filter_map(|e| e.ok())
            .any(|e| e.file_name() == file);
        if !present {
            return Ok(None);
        }
        read_optional(&dir.join(file))
    }
}

/// `owner` and `repo` of a GitHub repository URL in any of the forms found
/// in package metadata.
pub fn parse_github_repo(url: &str) -> Option<(String, String)> {
    let url = url.trim();
    let rest = if let Some(r) = url.strip_prefix("github:") {
        r
    } else if let Some(r) = url.strip_prefix("git@github.com:") {
        r
    } else if let Some(idx) = url.find("github.com") {
        url[idx + "github.com".len()..].trim_start_matches([':', '/'])
    } else if !url.contains(':') && url.matches('/').count() == 1 {
        url
    } else {
        return None;
    };
    let mut parts = rest.split(['/', '#', '?']);
    let owner = parts.next()?.to_string();
    let repo = parts.next()?.trim_end_matches(".git").to_string();
    if owner.is_empty() || repo.is_empty() {
        return None;
    }
    Some((owner, repo))
}

#[cfg(feature = "live")]
pub use live::{RawFileFetcher, RegistryFetcher};

#[cfg(feature = "live")]
mod live {
    use super::{parse_github_repo, repository_from_metadata, FileFetcher, HarvestError, MetadataFetcher};

    pub const DEFAULT_REGISTRY: &str = "https://registry.npmjs.org";
    pub const DEFAULT_RAW_BASE: &str = "https://raw.githubusercontent.com";

    fn get(url: &str) -> Result<Option<String>, HarvestError> {
        let fail = |message: String| HarvestError::Fetch {
            what: url.to_string(),
            message,
        };
        match ureq::get(url).call() {
            Ok(mut resp) => resp
                .body_mut()
                .read_to_string()
                .map(Some)
                .map_err(|e| fail(e.to_string())),
            Err(ureq::Error::StatusCode(404)) => Ok(None),
            Err(e) => Err(fail(e.to_string())),
        }
    }

    /// npm registry client. The base URL comes from `DTSGEN_REGISTRY` when
    /// not given.
    #[derive(Debug, Clone)]
    pub struct RegistryFetcher {
        pub base: String,
    }

    impl RegistryFetcher {
        pub fn new(base: Option<String>) -> Self {
            let base = base
                .or_else(|| std::env::var("DTSGEN_REGISTRY").ok())
                .unwrap_or_else(|| DEFAULT_REGISTRY.to_string());
            RegistryFetcher {
                base: base.trim_end_matches('/').to_string(),
            }
        }
    }

    impl MetadataFetcher for RegistryFetcher {
        fn repository_url(&self, package: &str) -> Result<Option<String>, HarvestError> {
            let url = format!("{}/{}", self.base, package.replace('/', "%2F"));
            match get(&url)? {
                Some(json) => repository_from_metadata(package, &json),
                None => Err(HarvestError::UnknownPackage(package.to_string())),
            }
        }
    }

    /// Raw file access on GitHub-hosted repositories. The base URL comes
    /// from `DTSGEN_RAW_BASE` when not given.
    #[derive(Debug, Clone)]
    pub struct RawFileFetcher {
        pub base: String,
    }

    impl RawFileFetcher {
        pub fn new(base: Option<String>) -> Self {
            let base = base
                .or_else(|| std::env::var("DTSGEN_RAW_BASE").ok())
                .unwrap_or_else(|| DEFAULT_RAW_BASE.to_string());
            RawFileFetcher {
                base: base.trim_end_matches('/').to_string(),
            }
        }
    }

    impl FileFetcher for RawFileFetcher {
        fn fetch(&self, repo: &str, file: &str) -> Result<Option<String>, HarvestError> {
            let (owner, name) = parse_github_repo(repo).ok_or_else(|| HarvestError::Fetch {
                what: repo.to_string(),
                message: "only GitHub repositories are supported".into(),
            })?;
            get(&format!("{}/{owner}/{name}/HEAD/{file}", self.base))
        }
    }
}
