//! The generation funnel: repository, README, examples, traces, inference,
//! emission. Each stage that can end a run has its own exit code.

use std::fmt;
use std::path::{Path, PathBuf};

use dtsgen_core::harvest::{
    fetch_readme, resolve_repository, FileFetcher, FixtureFetcher, MetadataFetcher,
    RawFileFetcher, RegistryFetcher,
};
use dtsgen_core::{emit, extract_code_examples, infer_module, load_trace, InferenceConfig, Trace};
use thiserror::Error;

use crate::tracer::Tracer;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    NoRepositoryUrl,
    NoReadme,
    NoExamples,
    ExamplesFailed,
    NoRuntimeInfo,
    InsufficientTrace,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::NoRepositoryUrl,
        Stage::NoReadme,
        Stage::NoExamples,
        Stage::ExamplesFailed,
        Stage::NoRuntimeInfo,
        Stage::InsufficientTrace,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Stage::NoRepositoryUrl => "no repository url",
            Stage::NoReadme => "no readme",
            Stage::NoExamples => "no examples",
            Stage::ExamplesFailed => "examples failed",
            Stage::NoRuntimeInfo => "no run-time information",
            Stage::InsufficientTrace => "insufficient trace",
        }
    }

    pub fn exit_code(self) -> u8 {
        10 + self as u8
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("{stage}: {message}")]
    Funnel { stage: Stage, message: String },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot emit declarations: {0}")]
    Emit(#[from] dtsgen_core::emit::EmitError),
}

impl GenerateError {
    fn funnel(stage: Stage, message: impl fmt::Display) -> Self {
        GenerateError::Funnel {
            stage,
            message: message.to_string(),
        }
    }

    pub fn stage(&self) -> Option<Stage> {
        match self {
            GenerateError::Funnel { stage, .. } => Some(*stage),
            _ => None,
        }
    }

    pub fn exit_code(&self) -> u8 {
        self.stage().map_or(2, Stage::exit_code)
    }
}

/// Where package metadata and READMEs come from.
pub enum Source {
    Fixtures(FixtureFetcher),
    Live(RegistryFetcher, RawFileFetcher),
}

impl Source {
    fn fetchers(&self) -> (&dyn MetadataFetcher, &dyn FileFetcher) {
        match self {
            Source::Fixtures(f) => (f, f),
            Source::Live(m, f) => (m, f),
        }
    }

    /// A trace recorded next to a fixture package, used instead of running
    /// the tracer.
    fn recorded_trace(&self, package: &str) -> Option<PathBuf> {
        match self {
            Source::Fixtures(f) => Some(f.package_dir(package).join("trace.json")).filter(|p| p.is_file()),
            Source::Live(..) => None,
        }
    }
}

pub struct Job<'a> {
    pub package: &'a str,
    pub output_dir: &'a Path,
    pub inference: &'a InferenceConfig,
    /// Run inference on this trace and skip every earlier stage.
    pub trace: Option<&'a Path>,
    /// Example files added to the ones found in the README.
    pub extra_examples: &'a [PathBuf],
    pub save_trace: bool,
}

pub struct Env<'a> {
    pub source: &'a Source,
    pub tracer: &'a Tracer,
    /// Parent for per-package working directories.
    pub work_dir: &'a Path,
}

#[derive(Debug)]
pub struct Generated {
    pub path: PathBuf,
    pub examples: usize,
    pub traced: usize,
}

pub fn generate(job: &Job, env: &Env) -> Result<Generated, GenerateError> {
    let (trace, examples, traced) = match job.trace {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| GenerateError::funnel(Stage::NoRuntimeInfo, format!("{}: {e}", path.display())))?;
            let trace = load_trace(&text)
                .map_err(|e| GenerateError::funnel(Stage::NoRuntimeInfo, format!("{}: {e}", path.display())))?;
            (trace, 0, 0)
        }
        None => collect_trace(job, env)?,
    };
    if trace.is_empty() {
        return Err(GenerateError::funnel(Stage::NoRuntimeInfo, "the trace records no functions"));
    }
    let module = infer_module(&trace, job.package, job.inference)
        .map_err(|e| GenerateError::funnel(Stage::InsufficientTrace, e))?;
    let text = emit(&module)?;
    let dir = job.output_dir.join(job.package);
    let write = |path: PathBuf, contents: &str| {
        std::fs::create_dir_all(&dir)
            .and_then(|()| std::fs::write(&path, contents))
            .map_err(|source| GenerateError::Write { path, source })
    };
    let path = dir.join("index.d.ts");
    write(path.clone(), &text)?;
    if job.save_trace {
        write(dir.join("trace.json"), &dtsgen_core::save_trace(&trace))?;
    }
    Ok(Generated {
        path,
        examples,
        traced,
    })
}

fn collect_trace(job: &Job, env: &Env) -> Result<(Trace, usize, usize), GenerateError> {
    let (metadata, files) = env.source.fetchers();
    let repo = resolve_repository(job.package, metadata)
        .map_err(|e| GenerateError::funnel(Stage::NoRepositoryUrl, e))?
        .ok_or_else(|| {
            GenerateError::funnel(
                Stage::NoRepositoryUrl,
                format!("package `{}` names no repository", job.package),
            )
        })?;
    let readme = fetch_readme(&repo, files)
        .map_err(|e| GenerateError::funnel(Stage::NoReadme, e))?
        .ok_or_else(|| GenerateError::funnel(Stage::NoReadme, format!("{repo} has no README")))?;
    let mut bodies: Vec<String> = extract_code_examples(&readme).into_iter().map(|e| e.body).collect();
    for path in job.extra_examples {
        let body = std::fs::read_to_string(path)
            .map_err(|e| GenerateError::funnel(Stage::NoExamples, format!("{}: {e}", path.display())))?;
        bodies.push(body);
    }
    if bodies.is_empty() {
        return Err(GenerateError::funnel(Stage::NoExamples, "the README has no JavaScript code blocks"));
    }
    if let Some(recorded) = env.source.recorded_trace(job.package) {
        let text = std::fs::read_to_string(&recorded)
            .map_err(|e| GenerateError::funnel(Stage::NoRuntimeInfo, format!("{}: {e}", recorded.display())))?;
        let trace = load_trace(&text)
            .map_err(|e| GenerateError::funnel(Stage::NoRuntimeInfo, format!("{}: {e}", recorded.display())))?;
        return Ok((trace, bodies.len(), bodies.len()));
    }

    let work = env.work_dir.join(job.package.replace('/', "__"));
    std::fs::create_dir_all(&work).map_err(|source| GenerateError::Write {
        path: work.clone(),
        source,
    })?;
    let mut trace = Trace::default();
    let mut traced = 0;
    let mut failures = Vec::new();
    for (i, body) in bodies.iter().enumerate() {
        let example = work.join(format!("example_{i}.js"));
        std::fs::write(&example, body).map_err(|source| GenerateError::Write {
            path: example.clone(),
            source,
        })?;
        let out = work.join(format!("trace_{i}.json"));
        match env.tracer.run(&work, &example, job.package, &out) {
            Ok(t) => {
                trace.merge(&t);
                traced += 1;
            }
            Err(e) => failures.push(format!("example {i}: {e}")),
        }
    }
    if traced == 0 {
        return Err(GenerateError::funnel(Stage::ExamplesFailed, failures.join("; ")));
    }
    Ok((trace, bodies.len(), traced))
}
