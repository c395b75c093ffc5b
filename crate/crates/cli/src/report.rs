//! The versioned JSON report envelope shared by every command.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use dx_core::{ResolvedTolerances, TolerancePolicy};

pub const SCHEMA_VERSION: &str = "dx-report/1";

/// The JSON Schema the envelope validates against.
pub const SCHEMA: &str = include_str!("../schema/dx-report-1.json");

#[derive(Clone, Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, contents: &[u8]) -> Self {
        Self {
            path: path.display().to_string(),
            bytes: contents.len(),
            sha256: hex::encode(Sha256::digest(contents)),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolicyReport {
    pub thresholds: TolerancePolicy,
    /// Absolute values after resolving against the analyzed matrix. Absent
    /// when no matrix was analyzed.
    pub resolved: Option<ResolvedTolerances>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report<P> {
    pub schema_version: &'static str,
    pub command: &'static str,
    pub exit_status: i32,
    pub inputs: Vec<InputDigest>,
    pub policy: PolicyReport,
    pub payload: P,
    pub warnings: Vec<String>,
}

impl<P: Serialize> Report<P> {
    pub fn new(
        command: &'static str,
        inputs: Vec<InputDigest>,
        thresholds: TolerancePolicy,
        resolved: Option<ResolvedTolerances>,
        payload: P,
        warnings: Vec<String>,
        exit_status: i32,
    ) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            exit_status,
            inputs,
            policy: PolicyReport { thresholds, resolved },
            payload,
            warnings,
        }
    }

    pub fn write(&self, out: &mut dyn Write) -> Result<(), crate::CliError> {
        serde_json::to_writer_pretty(&mut *out, self)?;
        writeln!(out)?;
        Ok(())
    }
}
