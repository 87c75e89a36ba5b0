//! Registry documents and dumps.
//!
//! A dump is either a directory of per-package `*.json` documents or a
//! JSON-lines file with one document per line.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::DateTime;
use serde_json::Value;
use snipkit_core::{compute_readme_stats, PackageRecord, ReadmeSource, Timestamp};

/// Placeholder the registry stores for packages published without a README.
pub const MISSING_README: &str = "ERROR: No README data found!";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("document {id} rejected: {reason}")]
pub struct DocRejected {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error("cannot read dump {path}: {source}")]
    Unreadable { path: PathBuf, source: std::io::Error },
}

/// One raw document out of a dump, identified for error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDoc {
    pub id: String,
    pub text: String,
}

fn read_lossy(path: &Path) -> Result<String, DumpError> {
    fs::read(path)
        .map(|bytes| String::from_utf8_lossy(&bytes).into_owned())
        .map_err(|source| DumpError::Unreadable { path: path.to_path_buf(), source })
}

/// Reads every document of a dump, in a stable order.
pub fn read_dump(path: &Path) -> Result<Vec<RawDoc>, DumpError> {
    let unreadable = |source| DumpError::Unreadable { path: path.to_path_buf(), source };
    if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(unreadable)?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "json"))
            .collect();
        files.sort();
        return files
            .into_iter()
            .map(|file| {
                let id = file.file_name().unwrap_or_default().to_string_lossy().into_owned();
                read_lossy(&file).map(|text| RawDoc { id, text })
            })
            .collect();
    }
    let text = read_lossy(path)?;
    Ok(text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(i, line)| RawDoc { id: format!("line {}", i + 1), text: line.to_string() })
        .collect())
}

fn string_field<'a>(doc: &'a Value, key: &str) -> Option<&'a str> {
    doc.get(key).and_then(Value::as_str)
}

/// Absent means no field or the registry placeholder; an empty README is
/// still a README (it only fails the non-empty stage of the stats).
fn readme_of(text: Option<&str>) -> Option<&str> {
    text.filter(|t| t.trim() != MISSING_README)
}

fn repository_url(doc: &Value) -> Option<String> {
    match doc.get("repository")? {
        Value::String(url) => Some(url.clone()),
        Value::Object(obj) => obj.get("url").and_then(Value::as_str).map(str::to_string),
        _ => None,
    }
    .filter(|url| !url.is_empty())
}

fn has_license(doc: &Value) -> bool {
    match doc.get("license") {
        Some(Value::String(s)) => !s.trim().is_empty() && !s.eq_ignore_ascii_case("UNLICENSED"),
        Some(Value::Object(obj)) => obj.get("type").and_then(Value::as_str).is_some_and(|t| !t.is_empty()),
        Some(Value::Array(list)) => !list.is_empty(),
        _ => false,
    }
}

fn keywords(doc: &Value) -> Vec<String> {
    match doc.get("keywords") {
        Some(Value::Array(list)) => list.iter().filter_map(Value::as_str).map(str::to_string).collect(),
        Some(Value::String(s)) => s.split([',', ' ']).filter(|k| !k.is_empty()).map(str::to_string).collect(),
        _ => Vec::new(),
    }
}

fn modified(doc: &Value) -> Timestamp {
    doc.get("time")
        .and_then(|t| t.get("modified"))
        .and_then(Value::as_str)
        .and_then(|s| DateTime::parse_from_rfc3339(s).ok())
        .map_or(Timestamp(0), |dt| Timestamp(dt.timestamp()))
}

/// Maps one registry document onto a [`PackageRecord`].
///
/// Besides the registry fields this reads two dump extensions: `stars`
/// (repository star count) and `repository_readme` (README fetched from the
/// repository, preferred when strictly longer than the registry copy, which
/// the registry truncates).
pub fn parse_registry_doc(id: &str, text: &str) -> Result<PackageRecord, DocRejected> {
    let reject = |reason: String| DocRejected { id: id.to_string(), reason };
    let doc: Value = serde_json::from_str(text).map_err(|e| reject(format!("malformed JSON: {e}")))?;
    if !doc.is_object() {
        return Err(reject("not a JSON object".into()));
    }
    let name = string_field(&doc, "name").map(str::trim).unwrap_or_default().to_lowercase();
    if name.is_empty() {
        return Err(reject("missing name".into()));
    }

    let registry = readme_of(string_field(&doc, "readme"));
    let repository = readme_of(string_field(&doc, "repository_readme"));
    let (readme_text, readme_source) = match (registry, repository) {
        (Some(reg), Some(repo)) if repo.chars().count() > reg.chars().count() => {
            (repo.to_string(), ReadmeSource::Repository)
        }
        (Some(reg), _) => (reg.to_string(), ReadmeSource::Registry),
        (None, Some(repo)) => (repo.to_string(), ReadmeSource::Repository),
        (None, None) => (String::new(), ReadmeSource::None),
    };

    Ok(PackageRecord {
        name,
        description: string_field(&doc, "description").unwrap_or_default().to_string(),
        keywords: keywords(&doc),
        stats: compute_readme_stats(&readme_text),
        readme_text,
        readme_source,
        repo_url: repository_url(&doc),
        stars: doc.get("stars").and_then(Value::as_u64).unwrap_or(0),
        has_license: has_license(&doc),
        last_modified: modified(&doc),
        snippet_count: 0,
    })
}
