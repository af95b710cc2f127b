//! Run reports: command echo, input digests, result payload and timings.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub seed: u64,
    pub inputs: Vec<InputDigest>,
    pub result: Value,
    /// Wall-clock time per phase in microseconds. Not reproducible.
    pub timings_us: Vec<(String, u128)>,
}

/// Reads a file and records its SHA-256 digest.
pub fn read_input(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<Vec<u8>, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
    inputs.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
    Ok(bytes)
}

pub fn timing(label: &str, d: Duration) -> (String, u128) {
    (label.to_string(), d.as_micros())
}
