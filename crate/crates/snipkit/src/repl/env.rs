//! Throwaway project directories.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU32, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

pub const MANIFEST: &str = "package.json";

/// Writes a minimal `package.json`, as `npm init -y` would.
pub fn write_manifest(dir: &Path, name: &str) -> io::Result<()> {
    let manifest = json!({
        "name": name,
        "version": "1.0.0",
        "private": true,
        "description": "scratch project created by snipkit",
        "dependencies": {},
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("serializable");
    text.push('\n');
    fs::write(dir.join(MANIFEST), text)
}

/// Dependency names listed in `dir/package.json`.
pub fn manifest_dependencies(dir: &Path) -> io::Result<BTreeSet<String>> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    Ok(doc
        .get("dependencies")
        .and_then(Value::as_object)
        .map(|deps| deps.keys().cloned().collect())
        .unwrap_or_default())
}

#[derive(Debug, thiserror::Error)]
pub enum EnvError {
    #[error("cannot create environment under {base}: {source}")]
    Create { base: PathBuf, source: io::Error },
    #[error("environment directory {0} no longer exists; restart snipkit to get a new one")]
    Lost(PathBuf),
    #[error("cannot read {path}: {source}")]
    Manifest { path: PathBuf, source: io::Error },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplEnvironment {
    pub root_dir: PathBuf,
    pub manifest_initialized: bool,
    /// Mirrors the manifest's dependencies.
    pub installed: BTreeSet<String>,
    /// Code accepted by the sandbox, in order.
    pub session_buffer: Vec<String>,
    pub last_viewed_snippet: Option<String>,
}

static COUNTER: AtomicU32 = AtomicU32::new(0);

impl ReplEnvironment {
    /// Creates a fresh, uniquely named project under `base`.
    pub fn create(base: &Path) -> Result<Self, EnvError> {
        let create_err = |source| EnvError::Create { base: base.to_path_buf(), source };
        fs::create_dir_all(base).map_err(create_err)?;
        let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_nanos()).unwrap_or(0);
        let root_dir = loop {
            let n = COUNTER.fetch_add(1, Ordering::Relaxed);
            let candidate = base.join(format!("snipkit-env-{}-{stamp:x}-{n}", std::process::id()));
            match fs::create_dir(&candidate) {
                Ok(()) => break candidate,
                Err(e) if e.kind() == io::ErrorKind::AlreadyExists => continue,
                Err(e) => return Err(create_err(e)),
            }
        };
        let name = root_dir.file_name().map(|n| n.to_string_lossy().to_lowercase()).unwrap_or_default();
        write_manifest(&root_dir, &name).map_err(create_err)?;
        Ok(Self {
            root_dir,
            manifest_initialized: true,
            installed: BTreeSet::new(),
            session_buffer: Vec::new(),
            last_viewed_snippet: None,
        })
    }

    pub fn ensure_exists(&self) -> Result<(), EnvError> {
        if self.root_dir.join(MANIFEST).is_file() {
            Ok(())
        } else {
            Err(EnvError::Lost(self.root_dir.clone()))
        }
    }

    /// Re-reads the installed set from the manifest.
    pub fn refresh_installed(&mut self) -> Result<(), EnvError> {
        self.ensure_exists()?;
        self.installed = manifest_dependencies(&self.root_dir)
            .map_err(|source| EnvError::Manifest { path: self.root_dir.join(MANIFEST), source })?;
        Ok(())
    }

    /// Removes the directory unless `keep`.
    pub fn teardown(self, keep: bool) -> io::Result<()> {
        if keep || !self.root_dir.exists() {
            return Ok(());
        }
        fs::remove_dir_all(&self.root_dir)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_environments_are_distinct_and_empty() {
        let base = tempfile::tempdir().unwrap();
        let a = ReplEnvironment::create(base.path()).unwrap();
        let b = ReplEnvironment::create(base.path()).unwrap();
        assert_ne!(a.root_dir, b.root_dir);
        assert!(a.manifest_initialized);
        assert!(manifest_dependencies(&a.root_dir).unwrap().is_empty());
        assert!(a.installed.is_empty() && a.session_buffer.is_empty());
    }

    #[test]
    fn lost_environment_is_detected() {
        let base = tempfile::tempdir().unwrap();
        let mut env = ReplEnvironment::create(base.path()).unwrap();
        fs::remove_dir_all(&env.root_dir).unwrap();
        assert!(matches!(env.ensure_exists(), Err(EnvError::Lost(_))));
        assert!(env.refresh_installed().is_err());
    }

    #[test]
    fn teardown_respects_keep() {
        let base = tempfile::tempdir().unwrap();
        let env = ReplEnvironment::create(base.path()).unwrap();
        let root = env.root_dir.clone();
        env.teardown(true).unwrap();
        assert!(root.join(MANIFEST).is_file());
        let env = ReplEnvironment::create(base.path()).unwrap();
        let root = env.root_dir.clone();
        env.teardown(false).unwrap();
        assert!(!root.exists());
    }
}
