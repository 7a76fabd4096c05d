//! Runs the TypeScript compiler over emitted files when one is installed.

mod common;

use std::path::Path;
use std::process::Command;

use dtsgen_core::{emit, infer_module, load_trace, InferenceConfig};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

fn tsc() -> Option<String> {
    let bin = std::env::var("DTSGEN_TSC").unwrap_or_else(|_| "tsc".into());
    Command::new(&bin).arg("--version").output().ok()?.status.success().then_some(bin)
}

fn typecheck(bin: &str, dir: &Path, files: &[String]) {
    let out = Command::new(bin)
        .args(["--noEmit", "--strict"])
        .args(files)
        .current_dir(dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn emitted_files_typecheck() {
    let Some(bin) = tsc() else {
        eprintln!("tsc not found, skipping");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for pkg in common::GOLDEN {
        let trace = load_trace(&common::read_fixture(pkg, "trace.json")).unwrap();
        let module = infer_module(&trace, pkg, &InferenceConfig::default()).unwrap();
        let name = format!("{pkg}.d.ts");
        std::fs::write(dir.path().join(&name), emit(&module).unwrap()).unwrap();
        files.push(name);
    }
    let mut runner = TestRunner::deterministic();
    for i in 0..40 {
        let m = common::ast::module().new_tree(&mut runner).unwrap().current();
        let name = format!("generated{i}.d.ts");
        std::fs::write(dir.path().join(&name), emit(&m).unwrap()).unwrap();
        files.push(name);
    }
    typecheck(&bin, dir.path(), &files);
}
