//! Runs the external tracer on one example file.

use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::thread::sleep;
use std::time::{Duration, Instant};

use dtsgen_core::{load_trace, Trace};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TracerError {
    #[error("tracer command is empty")]
    NoCommand,
    #[error("cannot start `{program}`: {source}")]
    Spawn {
        program: String,
        #[source]
        source: std::io::Error,
    },
    #[error("tracer exited with {status}; see {log}")]
    Failed { status: String, log: PathBuf },
    #[error("tracer timed out after {0:?}")]
    Timeout(Duration),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("tracer wrote an unreadable trace: {0}")]
    BadTrace(#[from] dtsgen_core::TraceError),
}

#[derive(Debug, Clone)]
pub struct Tracer {
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl Tracer {
    /// Runs `<command> <example> <module> <out>` in `cwd` and loads the
    /// trace it writes. Standard output is discarded; standard error goes
    /// to `<out>.log`.
    pub fn run(&self, cwd: &Path, example: &Path, module: &str, out: &Path) -> Result<Trace, TracerError> {
        let (program, args) = self.command.split_first().ok_or(TracerError::NoCommand)?;
        let log = out.with_extension("log");
        let io = |path: &Path| {
            let path = path.to_path_buf();
            move |source| TracerError::Io { path, source }
        };
        let stderr = File::create(&log).map_err(io(&log))?;
        let mut child = Command::new(program)
            .args(args)
            .arg(example)
            .arg(module)
            .arg(out)
            .current_dir(cwd)
            .stdin(Stdio::null())
            .stdout(Stdio::null())
            .stderr(stderr)
            .spawn()
            .map_err(|source| TracerError::Spawn {
                program: program.clone(),
                source,
            })?;
        let start = Instant::now();
        let status = loop {
            if let Some(status) = child.try_wait().map_err(io(example))? {
                break status;
            }
            if start.elapsed() >= self.timeout {
                let _ = child.kill();
                let _ = child.wait();
                return Err(TracerError::Timeout(self.timeout));
            }
            sleep(Duration::from_millis(10));
        };
        if !status.success() {
            return Err(TracerError::Failed {
                status: status.to_string(),
                log,
            });
        }
        let text = std::fs::read_to_string(out).map_err(io(out))?;
        Ok(load_trace(&text)?)
    }
}
