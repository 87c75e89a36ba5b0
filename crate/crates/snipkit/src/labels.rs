//! Install-success labels for training the runnability model.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use snipkit_core::forest::{featurize, LabeledExample};
use snipkit_core::{PackageRecord, Timestamp};

use crate::pm::{PackageManager, PmError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub name: String,
    pub label: bool,
    #[serde(default)]
    pub timeout: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("package manager unavailable: {0}")]
    Unavailable(String),
    #[error("cannot prepare environment {path}: {source}")]
    Environment { path: PathBuf, source: std::io::Error },
}

/// Installs `name` into a fresh project under `scratch` and reports whether
/// the package manager succeeded within `timeout`.
pub fn label_oracle(pm: &PackageManager, name: &str, scratch: &Path, timeout: Duration) -> Result<LabelRecord, OracleError> {
    let dir = scratch.join(format!("label-{}", name.replace('/', "__")));
    let env_err = |source| OracleError::Environment { path: dir.clone(), source };
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(env_err)?;
    }
    fs::create_dir_all(&dir).map_err(env_err)?;
    crate::repl::env::write_manifest(&dir, "snipkit-label").map_err(env_err)?;
    let result = pm.install(&dir, name, timeout, &mut |_| {});
    let _ = fs::remove_dir_all(&dir);
    match result {
        Ok(_) => Ok(LabelRecord { name: name.to_string(), label: true, timeout: false }),
        Err(PmError::Timeout { .. }) => Ok(LabelRecord { name: name.to_string(), label: false, timeout: true }),
        Err(PmError::Failed { .. }) => Ok(LabelRecord { name: name.to_string(), label: false, timeout: false }),
        Err(e @ (PmError::Missing(_) | PmError::Spawn(_))) => Err(OracleError::Unavailable(e.to_string())),
        Err(e) => Err(OracleError::Unavailable(e.to_string())),
    }
}

pub fn read_labels(path: &Path) -> Result<Vec<LabelRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading labels {}", path.display()))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).with_context(|| format!("{}:{}", path.display(), i + 1)))
        .collect()
}

pub fn write_labels(path: &Path, labels: &[LabelRecord]) -> Result<()> {
    let mut out = Vec::new();
    for label in labels {
        serde_json::to_writer(&mut out, label)?;
        out.write_all(b"\n")?;
    }
    fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

/// Pairs labels with corpus records; labels for unknown packages are skipped.
pub fn training_examples(records: &[PackageRecord], labels: &[LabelRecord], now: Timestamp) -> Vec<LabeledExample> {
    labels
        .iter()
        .filter_map(|label| {
            let record = records.iter().find(|r| r.name == label.name)?;
            Some(LabeledExample { features: featurize(record, now), label: label.label })
        })
        .collect()
}
