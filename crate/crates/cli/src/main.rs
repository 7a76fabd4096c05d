mod pipeline;
mod settings;
mod tracer;

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dtsgen_core::compare::{compare_sources, CompareError};
use dtsgen_core::harvest::{FixtureFetcher, RawFileFetcher, RegistryFetcher};
use dtsgen_core::{expand_aliases, extract_code_examples, parse_module, InferenceConfig};
use rayon::prelude::*;

use pipeline::{Env, GenerateError, Job, Source, Stage};
use settings::Settings;
use tracer::Tracer;

/// Generates, parses and compares TypeScript declaration files.
#[derive(Parser)]
#[command(name = "dts-generate", version)]
struct Cli {
    /// TOML settings file. Defaults to $DTSGEN_CONFIG, then ./dtsgen.toml
    /// when present.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate output/<package>/index.d.ts for a package.
    Generate(GenerateArgs),
    /// Parse a declaration file and print its AST as JSON.
    Parse {
        file: PathBuf,
        #[arg(long, default_value = "")]
        module_name: String,
        /// Inline type aliases before printing.
        #[arg(long)]
        expand_aliases: bool,
    },
    /// Compare two declaration files and print the report as JSON.
    Compare {
        #[arg(short, long)]
        expected: PathBuf,
        #[arg(short, long)]
        actual: PathBuf,
        #[arg(long)]
        module_name: String,
        /// Compare even when the expected file uses features the generator
        /// never produces.
        #[arg(long)]
        no_filter: bool,
    },
    /// Print the JavaScript code blocks of a README.
    Extract {
        readme: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Package name. Not used with --batch.
    #[arg(required_unless_present = "batch")]
    package: Option<String>,
    /// Read package metadata and READMEs from this fixture directory
    /// instead of the network.
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Infer from this trace file; skips extraction and tracing.
    #[arg(long, conflicts_with = "batch")]
    trace: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Nesting limit for interfaces built from argument interactions.
    #[arg(long)]
    depth: Option<usize>,
    /// Export name override, also used to match the traced module.
    #[arg(long)]
    module_name: Option<String>,
    /// Extra example file to trace; repeatable.
    #[arg(long = "example")]
    examples: Vec<PathBuf>,
    /// Tracer command; the example, module name and output path are
    /// appended.
    #[arg(long, num_args = 1.., allow_hyphen_values = true)]
    tracer: Option<Vec<String>>,
    /// File with one package name per line; packages run in parallel.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Also write the merged trace next to the declaration file.
    #[arg(long)]
    save_trace: bool,
}

fn load_settings(cli_config: Option<&Path>) -> Result<Settings, String> {
    let env: HashMap<String, String> = std::env::vars().collect();
    let path = cli_config
        .map(Path::to_path_buf)
        .or_else(|| env.get("DTSGEN_CONFIG").map(PathBuf::from))
        .or_else(|| Some(PathBuf::from("dtsgen.toml")).filter(|p| p.is_file()));
    let mut settings = match path {
        Some(p) => Settings::from_file(&p).map_err(|e| e.to_string())?,
        None => Settings::default(),
    };
    settings.apply_env(&env).map_err(|e| e.to_string())?;
    Ok(settings)
}

/// Writes to stdout, ignoring a closed pipe.
fn out(text: &str) {
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_parse(file: &Path, module_name: &str, expand: bool) -> ExitCode {
    let result = read(file).and_then(|src| {
        let module = parse_module(&src, module_name).map_err(|e| format!("{}:{e}", file.display()))?;
        if expand {
            expand_aliases(module).map_err(|e| format!("{}: {e}", file.display()))
        } else {
            Ok(module)
        }
    });
    match result {
        Ok(module) => {
            out(&format!("{}\n", module.to_json()));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_compare(expected: &Path, actual: &Path, module_name: &str, filter: bool) -> ExitCode {
    let sources = read(expected).and_then(|e| Ok((e, read(actual)?)));
    let (e, a) = match sources {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match compare_sources(&e, &a, module_name, filter) {
        Ok(c) => {
            out(&c.report.to_json());
            if c.report.differences.is_empty() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(err @ CompareError::Filtered(_)) => {
            eprintln!("skipped: {err}");
            ExitCode::from(2)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn cmd_extract(readme: &Path, json: bool) -> ExitCode {
    let text = match read(readme) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let examples = extract_code_examples(&text);
    if json {
        out(&format!(
            "{}\n",
            serde_json::to_string_pretty(&examples).expect("examples are serializable")
        ));
    } else {
        let mut text = String::new();
        for (n, ex) in examples.iter().enumerate() {
            text += &format!("--- example {} ({}) ---\n{}", n + 1, ex.language_tag, ex.body);
            if !ex.body.ends_with('\n') {
                text.push('\n');
            }
        }
        out(&text);
    }
    ExitCode::SUCCESS
}

fn read_batch(path: &Path) -> Result<Vec<String>, String> {
    Ok(read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(String::from)
        .collect())
}

fn cmd_generate(args: GenerateArgs, mut settings: Settings) -> ExitCode {
    settings.overlay(Settings {
        fixtures: args.fixtures.clone(),
        output: args.output.clone(),
        depth_limit: args.depth,
        tracer: args.tracer.clone(),
        jobs: args.jobs,
        ..Settings::default()
    });
    let source = match &settings.fixtures {
        Some(dir) => Source::Fixtures(FixtureFetcher::new(dir)),
        None => Source::Live(
            RegistryFetcher::new(settings.registry.clone()),
            RawFileFetcher::new(settings.raw_base.clone()),
        ),
    };
    let tracer = Tracer {
        command: settings.tracer_command(),
        timeout: settings.tracer_timeout(),
    };
    let temp;
    let work_dir = match &settings.work_dir {
        Some(dir) => dir.clone(),
        None => match tempfile::tempdir() {
            Ok(dir) => {
                temp = dir;
                temp.path().to_path_buf()
            }
            Err(e) => {
                eprintln!("error: cannot create a working directory: {e}");
                return ExitCode::from(2);
            }
        },
    };
    let inference = InferenceConfig {
        depth_limit: settings.depth_limit.unwrap_or(InferenceConfig::default().depth_limit),
        module_name: args.module_name.clone(),
    };
    let output_dir = settings.output_dir();
    let env = Env {
        source: &source,
        tracer: &tracer,
        work_dir: &work_dir,
    };
    let run = |package: &str, trace: Option<&Path>| {
        let job = Job {
            package,
            output_dir: &output_dir,
            inference: &inference,
            trace,
            extra_examples: &args.examples,
            save_trace: args.save_trace,
        };
        pipeline::generate(&job, &env)
    };

    let Some(batch) = &args.batch else {
        let package = args.package.as_deref().expect("clap requires a package");
        return match run(package, args.trace.as_deref()) {
            Ok(done) => {
                if done.examples > 0 {
                    eprintln!("{package}: traced {} of {} examples", done.traced, done.examples);
                }
                println!("{}", done.path.display());
                ExitCode::SUCCESS
            }
            Err(e) => report_failure(package, &e),
        };
    };

    let packages = match read_batch(batch) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.jobs.unwrap_or(0))
        .build()
        .expect("thread pool");
    let results: Vec<(String, Result<pipeline::Generated, GenerateError>)> = pool.install(|| {
        packages
            .par_iter()
            .map(|p| (p.clone(), run(p, None)))
            .collect()
    });
    let mut funnel: BTreeMap<Stage, usize> = BTreeMap::new();
    let mut generated = 0;
    let mut other_errors = 0;
    for (package, result) in &results {
        match result {
            Ok(done) => {
                generated += 1;
                println!(
                    "{package}: {} ({} of {} examples traced)",
                    done.path.display(),
                    done.traced,
                    done.examples
                );
            }
            Err(e) => {
                println!("{package}: {e}");
                match e.stage() {
                    Some(stage) => *funnel.entry(stage).or_default() += 1,
                    None => other_errors += 1,
                }
            }
        }
    }
    println!("packages: {}", results.len());
    for stage in Stage::ALL {
        println!("{}: {}", stage, funnel.get(&stage).copied().unwrap_or(0));
    }
    if other_errors > 0 {
        println!("other errors: {other_errors}");
    }
    println!("generated: {generated}");
    if generated == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn report_failure(package: &str, e: &GenerateError) -> ExitCode {
    eprintln!("{package}: {e}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Parse {
            file,
            module_name,
            expand_aliases,
        } => cmd_parse(&file, &module_name, expand_aliases),
        Command::Compare {
            expected,
            actual,
            module_name,
            no_filter,
        } => cmd_compare(&expected, &actual, &module_name, !no_filter),
        Command::Extract { readme, json } => cmd_extract(&readme, json),
        Command::Generate(args) => match load_settings(cli.config.as_deref()) {
            Ok(settings) => cmd_generate(args, settings),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
