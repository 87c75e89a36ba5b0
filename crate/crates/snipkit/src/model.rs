//! Runnability models on disk, the bundled default, and search indexes.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use snipkit_core::forest::{featurize, predict, RunnabilityModel};
use snipkit_core::search::InvertedIndex;
use snipkit_core::{PackageRecord, Timestamp};

use crate::db::Database;

/// Model trained on install-oracle labels over the fixture corpus.
pub const DEFAULT_MODEL: &[u8] = include_bytes!("../assets/default_model.bin");

pub fn default_model() -> RunnabilityModel {
    RunnabilityModel::from_bytes(DEFAULT_MODEL).expect("bundled model decodes")
}

/// Loads `path`, or the bundled model when no path is given.
pub fn load_model(path: Option<&Path>) -> Result<RunnabilityModel> {
    match path {
        None => Ok(default_model()),
        Some(path) => {
            let bytes = fs::read(path).with_context(|| format!("reading model {}", path.display()))?;
            RunnabilityModel::from_bytes(&bytes).with_context(|| format!("loading model {}", path.display()))
        }
    }
}

/// Builds the index for `records`, scoring each package with `model`.
pub fn build_index(records: &[PackageRecord], model: &RunnabilityModel, now: Timestamp) -> Result<InvertedIndex> {
    let mut index = InvertedIndex::build(records);
    rescore(&mut index, records, model, now)?;
    Ok(index)
}

pub fn rescore(index: &mut InvertedIndex, records: &[PackageRecord], model: &RunnabilityModel, now: Timestamp) -> Result<()> {
    for record in records {
        let p = predict(model, &featurize(record, now))?;
        index.set_probability(&record.name, p);
    }
    Ok(())
}

pub fn save_index(index: &InvertedIndex, path: &Path) -> Result<()> {
    let mut bytes = serde_json::to_vec(index)?;
    bytes.push(b'\n');
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// The persisted index, or a freshly built one when none was written yet.
pub fn load_or_build_index(db: &Database, model: &RunnabilityModel, now: Timestamp) -> Result<InvertedIndex> {
    let path = db.index_path();
    if path.is_file() {
        let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
        return serde_json::from_slice(&bytes).with_context(|| format!("decoding {}", path.display()));
    }
    build_index(&db.records()?, model, now)
}
