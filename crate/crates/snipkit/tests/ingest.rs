mod common;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use snipkit::db::{ingest_corpus, Database, DbError};
use snipkit_core::{compute_readme_stats, CorpusStats};

fn tree(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap().flatten() {
            let path = entry.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_string_lossy().into_owned(), fs::read(&path).unwrap());
            }
        }
    }
    out
}

#[test]
fn fixture_stats_match_hand_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let db = common::fixture_db(tmp.path());
    // 30 documents: two without a README field, one registry placeholder,
    // one whitespace-only README, four READMEs without JavaScript fences.
    assert_eq!(
        db.stats(),
        CorpusStats {
            total_packages: 30,
            packages_with_readme: 27,
            packages_with_nonempty_readme: 26,
            packages_with_snippets: 22,
            total_snippets: 28,
        }
    );
    assert!(db.stats().is_monotone());
    assert_eq!(db.package_names().count(), 22);
    assert!(db.contains("csv-kit") && !db.contains("bash-only"));
    assert!(db.manifest().rejected.is_empty());
}

#[test]
fn reingesting_is_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    common::fixture_db(a.path());
    common::fixture_db(b.path());
    let first = tree(a.path());
    assert_eq!(first, tree(b.path()));
    common::fixture_db(a.path());
    assert_eq!(first, tree(a.path()));
}

#[test]
fn stored_records_keep_consistent_stats() {
    let tmp = tempfile::tempdir().unwrap();
    let db = common::fixture_db(tmp.path());
    for record in db.records().unwrap() {
        assert_eq!(record.stats, compute_readme_stats(&record.readme_text), "{}", record.name);
        let snippets = db.snippets(&record.name).unwrap();
        assert_eq!(snippets.len() as u32, record.snippet_count);
        assert!(snippets.windows(2).all(|w| w[0].ordinal < w[1].ordinal));
        assert!(snippets.iter().all(|s| s.correction.is_some()));
    }
    let kit = db.record("string-case").unwrap();
    assert_eq!(kit.readme_source, snipkit_core::ReadmeSource::Repository);
}

#[test]
fn json_lines_dump_gives_the_same_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let dir_db = common::fixture_db(&tmp.path().join("a"));
    let mut lines = String::new();
    let mut files: Vec<_> = fs::read_dir(common::fixtures().join("dump")).unwrap().flatten().map(|e| e.path()).collect();
    files.sort();
    for f in files {
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(f).unwrap()).unwrap();
        lines.push_str(&doc.to_string());
        lines.push('\n');
    }
    lines.push_str("{not json\n{\"description\": \"no name\"}\n");
    let dump = tmp.path().join("dump.jsonl");
    fs::write(&dump, lines).unwrap();
    let summary = ingest_corpus(&dump, &tmp.path().join("b")).unwrap();
    assert_eq!(summary.manifest.stats, dir_db.stats());
    assert_eq!(summary.manifest.rejected.len(), 2);
    assert_eq!(summary.manifest.snapshot_time, dir_db.manifest().snapshot_time);
}

#[test]
fn empty_and_missing_dumps() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let summary = ingest_corpus(&empty, &tmp.path().join("db")).unwrap();
    assert_eq!(summary.manifest.stats, CorpusStats::default());
    assert!(ingest_corpus(&tmp.path().join("nope"), &tmp.path().join("db2")).is_err());
    assert!(matches!(Database::open(&tmp.path().join("nothing")), Err(DbError::Missing(_))));
}
