//! Helpers shared by the CLI test suites: run the binary from the tests
//! directory (so path echoes are relative and byte-stable) and normalize
//! the one envelope field that changes across releases.

// Each test binary uses its own subset of these helpers.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn tests_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

pub struct RunResult {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> RunResult {
    let out = Command::new(env!("CARGO_BIN_EXE_kdcalc"))
        .args(args)
        .current_dir(tests_dir())
        .output()
        .expect("binary is runnable");
    RunResult {
        code: out.status.code().expect("process exited normally"),
        stdout: String::from_utf8(out.stdout).expect("stdout is utf-8"),
        stderr: String::from_utf8(out.stderr).expect("stderr is utf-8"),
    }
}

/// Replaces the envelope's `version` value with a placeholder so goldens
/// survive version bumps.
pub fn normalize_version(text: &str) -> String {
    const KEY: &str = "\"version\": \"";
    match text.find(KEY) {
        Some(start) => {
            let vstart = start + KEY.len();
            let vend = vstart + text[vstart..].find('"').expect("version value is quoted");
            format!("{}<version>{}", &text[..vstart], &text[vend..])
        }
        None => text.to_string(),
    }
}

pub fn read_golden(name: &str) -> String {
    let path = tests_dir().join("golden").join(name);
    std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("golden file {} unreadable: {e}", path.display()))
}

/// Parses the single-line stderr diagnostic.
pub fn diagnostic(stderr: &str) -> serde_json::Value {
    let lines: Vec<&str> = stderr.lines().collect();
    assert_eq!(lines.len(), 1, "stderr must be exactly one line: {stderr:?}");
    serde_json::from_str(lines[0]).expect("stderr line is JSON")
}

pub fn error_kind(stderr: &str) -> String {
    diagnostic(stderr)["error_kind"]
        .as_str()
        .expect("error_kind is a string")
        .to_string()
}
