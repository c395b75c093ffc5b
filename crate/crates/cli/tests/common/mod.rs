#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use dx_core::fixtures::profile_table;
use dx_core::ionet::IoTable;
use dx_core::Matrix;
use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).unwrap_or_else(|e| panic!("{e}: {}", self.stdout))
    }
}

pub fn dx<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_dx")).args(args).output().expect("spawn dx");
    Run {
        code: out.status.code().expect("exit status"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

pub fn write_matrix(dir: &Path, name: &str, rows: &[&[f64]]) -> PathBuf {
    write(dir, name, &Matrix::from_rows(rows).unwrap().to_csv())
}

/// Table whose column-normalized shares are `diag(shares)`.
pub fn diagonal_table(shares: &[f64]) -> IoTable {
    let n = shares.len();
    let mut f = Matrix::zeros(n, n);
    for (i, s) in shares.iter().enumerate() {
        f[(i, i)] = s * 1000.0;
    }
    IoTable::new((0..n).map(|i| format!("s{}", i + 1)).collect(), f, vec![1000.0; n]).unwrap()
}

/// Shares whose zero eigenvalue sits in a nilpotent Jordan block of size 2.
pub fn defective_table(seed: u64) -> IoTable {
    profile_table(6, 5, 4, 0, seed).unwrap()
}

pub fn schema() -> jsonschema::Validator {
    let s: Value = serde_json::from_str(dx_cli::report::SCHEMA).unwrap();
    jsonschema::validator_for(&s).expect("schema compiles")
}

pub fn assert_valid(report: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(report).map(|e| format!("{e} at {}", e.instance_path)).collect();
    assert!(errors.is_empty(), "schema violations: {errors:#?}");
}
