#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use snipkit::db::{ingest_corpus, Database};
use snipkit::pm::PackageManager;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").canonicalize().expect("fixtures dir")
}

/// Ingests the fixture dump into `dir` and opens it.
pub fn fixture_db(dir: &Path) -> Database {
    ingest_corpus(&fixtures().join("dump"), dir).expect("ingest fixture dump");
    Database::open(dir).expect("open db")
}

/// Whether `program --version` runs.
pub fn available(program: &str) -> bool {
    Command::new(program).arg("--version").output().is_ok_and(|o| o.status.success())
}

/// npm against the fixture registry, offline.
pub fn fixture_npm() -> PackageManager {
    PackageManager { program: "npm".into(), registry: Some(fixtures().join("registry")), offline: true }
}

/// Console lines printed between the replay markers of a transcript log.
pub fn replay_console(log: &[String]) -> Option<Vec<String>> {
    let start = log.iter().rposition(|l| l.starts_with("sys| replaying "))?;
    let end = start + log[start..].iter().position(|l| l == "sys| replay finished")?;
    Some(log[start..end].iter().filter_map(|l| l.strip_prefix("out| ")).map(str::to_string).collect())
}

pub fn environment_dir(log: &[String]) -> Option<PathBuf> {
    log.iter().find_map(|l| l.strip_prefix("sys| environment ")).map(PathBuf::from)
}
