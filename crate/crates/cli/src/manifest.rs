use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

/// Everything needed to rerun a command: its name, every flag (defaults
/// included) and the seed. Keys are written in a fixed order; flag keys
/// are sorted.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub flags: Value,
    pub master_seed: Option<u64>,
    pub version: String,
    pub wall_time_seconds: f64,
}

/// `<out>.manifest.json`
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write(out: &Path, manifest: &RunManifest) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes") + "\n";
    std::fs::write(manifest_path(out), text)
}
