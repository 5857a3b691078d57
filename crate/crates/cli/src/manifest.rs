//! `manifest.json`: what produced an output directory and how to redo it.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{KeyValues, Settings};
use crate::CliError;

pub const RESOLVED_CONF: &str = "resolved.conf";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub created: String,
    /// Every resolved key, including defaults.
    pub config: KeyValues,
    /// sha256 of `resolved.conf`.
    pub config_digest: String,
    pub rerun: String,
    pub outputs: Vec<String>,
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Writes `resolved.conf` and `manifest.json` into `dir`.
pub fn write(dir: &Path, command: &str, settings: &Settings, outputs: Vec<String>) -> Result<Manifest, CliError> {
    let conf = settings.to_conf();
    std::fs::write(dir.join(RESOLVED_CONF), &conf)?;
    let m = Manifest {
        tool: "enactlab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        config: settings.values.clone(),
        config_digest: digest(&conf),
        rerun: format!("enactlab {command} --config {}", dir.join(RESOLVED_CONF).display()),
        outputs,
    };
    let json = serde_json::to_string_pretty(&m).map_err(|e| CliError::Runtime(e.to_string()))?;
    std::fs::write(dir.join(MANIFEST), json + "\n")?;
    Ok(m)
}
