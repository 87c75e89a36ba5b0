//! On-disk corpus database.
//!
//! Layout:
//!
//! ```text
//! <db>/manifest.json                  corpus stats, rejects, package table
//! <db>/objects/<aa>/<sha256>.json     package records and snippet lists
//! <db>/index.json                     search index (written by `index`)
//! ```
//!
//! Objects are content-addressed and every file is written from sorted data,
//! so ingesting the same dump twice gives byte-identical trees.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use snipkit_core::js::correct_snippets;
use snipkit_core::{CorpusStats, DropReason, Extraction, PackageRecord, Snippet, Timestamp};

use crate::corpus::{parse_registry_doc, read_dump, DocRejected, DumpError};

pub const DB_FORMAT: &str = "snipkit-db/1";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const OBJECTS_DIR: &str = "objects";
pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, thiserror::Error)]
pub enum DbError {
    #[error(transparent)]
    Dump(#[from] DumpError),
    #[error("no corpus database at {0} (run `snipkit mine` first)")]
    Missing(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Corrupt { path: PathBuf, source: serde_json::Error },
    #[error("unsupported database format `{0}`")]
    Format(String),
    #[error("package `{0}` is not in the corpus")]
    UnknownPackage(String),
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DbError + '_ {
    move |source| DbError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectedDoc {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PackageEntry {
    pub name: String,
    pub snippet_count: u32,
    /// Object paths relative to the database root.
    pub record: String,
    pub snippets: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub format: String,
    pub stats: CorpusStats,
    /// Latest modification time in the dump; the default "now" for features.
    pub snapshot_time: Timestamp,
    /// Dropped fences per drop reason, over all packages.
    pub drop_tallies: BTreeMap<String, u64>,
    pub rejected: Vec<RejectedDoc>,
    pub packages: Vec<PackageEntry>,
}

#[derive(Debug, Clone)]
pub struct IngestSummary {
    pub manifest: Manifest,
}

struct Processed {
    record: PackageRecord,
    snippets: Vec<Snippet>,
    drops: [u64; 3],
}

fn process(mut record: PackageRecord) -> Processed {
    let extraction = Extraction::from_markdown(&record.readme_text);
    let mut drops = [0u64; 3];
    for block in extraction.dropped() {
        if let Some(reason) = block.drop_reason {
            let slot = DropReason::ALL.iter().position(|r| *r == reason).unwrap_or(0);
            drops[slot] += 1;
        }
    }
    let mut snippets = extraction.into_snippets(&record.name);
    correct_snippets(&mut snippets);
    record.snippet_count = snippets.len() as u32;
    Processed { record, snippets, drops }
}

fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

/// Writes `bytes` under `objects/` and returns the relative path.
fn put_object(root: &Path, bytes: &[u8]) -> Result<String, DbError> {
    let digest = hex::encode(Sha256::digest(bytes));
    let rel = format!("{OBJECTS_DIR}/{}/{}.json", &digest[..2], digest);
    let path = root.join(&rel);
    if !path.exists() {
        let dir = path.parent().expect("object dir");
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        fs::write(&path, bytes).map_err(io_err(&path))?;
    }
    Ok(rel)
}

fn clear(root: &Path) -> Result<(), DbError> {
    for name in [MANIFEST_FILE, INDEX_FILE] {
        let path = root.join(name);
        if path.exists() {
            fs::remove_file(&path).map_err(io_err(&path))?;
        }
    }
    let objects = root.join(OBJECTS_DIR);
    if objects.exists() {
        fs::remove_dir_all(&objects).map_err(io_err(&objects))?;
    }
    Ok(())
}

/// Parses, extracts and corrects every package of a dump and replaces the
/// database at `db` with the result. Bad documents are skipped and listed in
/// the manifest; packages without snippets only count towards the stats.
pub fn ingest_corpus(dump: &Path, db: &Path) -> Result<IngestSummary, DbError> {
    let docs = read_dump(dump)?;
    let parsed: Vec<Result<PackageRecord, DocRejected>> =
        docs.par_iter().map(|doc| parse_registry_doc(&doc.id, &doc.text)).collect();

    let mut rejected = Vec::new();
    let mut by_name: BTreeMap<String, PackageRecord> = BTreeMap::new();
    for (doc, result) in docs.iter().zip(parsed) {
        match result {
            Ok(record) if by_name.contains_key(&record.name) => rejected.push(RejectedDoc {
                id: doc.id.clone(),
                reason: format!("duplicate package name `{}`", record.name),
            }),
            Ok(record) => {
                by_name.insert(record.name.clone(), record);
            }
            Err(e) => rejected.push(RejectedDoc { id: e.id, reason: e.reason }),
        }
    }

    let processed: Vec<Processed> = by_name.into_values().collect::<Vec<_>>().into_par_iter().map(process).collect();

    fs::create_dir_all(db).map_err(io_err(db))?;
    clear(db)?;
    let mut stats = CorpusStats::default();
    let mut tallies = [0u64; 3];
    let mut snapshot_time = Timestamp(0);
    let mut packages = Vec::new();
    for item in &processed {
        stats.record(&item.record, item.snippets.len());
        snapshot_time = snapshot_time.max(item.record.last_modified);
        for (slot, n) in item.drops.iter().enumerate() {
            tallies[slot] += n;
        }
        if item.snippets.is_empty() {
            continue;
        }
        packages.push(PackageEntry {
            name: item.record.name.clone(),
            snippet_count: item.snippets.len() as u32,
            record: put_object(db, &to_json(&item.record))?,
            snippets: put_object(db, &to_json(&item.snippets))?,
        });
    }
    let manifest = Manifest {
        format: DB_FORMAT.to_string(),
        stats,
        snapshot_time,
        drop_tallies: DropReason::ALL
            .iter()
            .zip(tallies)
            .map(|(reason, n)| (reason.as_str().to_string(), n))
            .collect(),
        rejected,
        packages,
    };
    let path = db.join(MANIFEST_FILE);
    fs::write(&path, to_json(&manifest)).map_err(io_err(&path))?;
    Ok(IngestSummary { manifest })
}

/// Read-only handle on an ingested database.
#[derive(Debug, Clone)]
pub struct Database {
    root: PathBuf,
    manifest: Manifest,
    by_name: BTreeMap<String, usize>,
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, DbError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    serde_json::from_slice(&bytes).map_err(|source| DbError::Corrupt { path: path.to_path_buf(), source })
}

impl Database {
    pub fn open(root: &Path) -> Result<Self, DbError> {
        let path = root.join(MANIFEST_FILE);
        if !path.is_file() {
            return Err(DbError::Missing(root.to_path_buf()));
        }
        let manifest: Manifest = read_json(&path)?;
        if manifest.format != DB_FORMAT {
            return Err(DbError::Format(manifest.format));
        }
        let by_name = manifest.packages.iter().enumerate().map(|(i, p)| (p.name.clone(), i)).collect();
        Ok(Self { root: root.to_path_buf(), manifest, by_name })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn manifest(&self) -> &Manifest {
        &self.manifest
    }

    pub fn stats(&self) -> CorpusStats {
        self.manifest.stats
    }

    pub fn package_names(&self) -> impl Iterator<Item = &str> {
        self.manifest.packages.iter().map(|p| p.name.as_str())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    fn entry(&self, name: &str) -> Result<&PackageEntry, DbError> {
        self.by_name
            .get(name)
            .map(|&i| &self.manifest.packages[i])
            .ok_or_else(|| DbError::UnknownPackage(name.to_string()))
    }

    pub fn record(&self, name: &str) -> Result<PackageRecord, DbError> {
        read_json(&self.root.join(&self.entry(name)?.record))
    }

    /// Snippets in README order, with corrections.
    pub fn snippets(&self, name: &str) -> Result<Vec<Snippet>, DbError> {
        read_json(&self.root.join(&self.entry(name)?.snippets))
    }

    pub fn records(&self) -> Result<Vec<PackageRecord>, DbError> {
        self.manifest.packages.par_iter().map(|p| read_json(&self.root.join(&p.record))).collect()
    }

    pub fn index_path(&self) -> PathBuf {
        self.root.join(INDEX_FILE)
    }
}
