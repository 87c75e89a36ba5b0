//! One line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use snipkit_core::forest::{predict, synthetic_rule_examples, train_forest, FeatureVector, Hyperparams, LabeledExample};
use snipkit_core::js::{correct_snippet, error_count, lint, restore_commented, sort_snippets, LintConfig};
use snipkit_core::search::{porter_stem, query_packages, tokenize, InvertedIndex, RankingMode};
use snipkit_core::extract::SnippetCorrection;
use snipkit_core::{DropReason, Extraction, PackageRecord, Snippet};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ---------------------------------------------------------------------

fn extraction_fidelity() -> Outcome {
    let dir = common::fixtures().join("readmes");
    let mut readmes = 0;
    let mut fences = 0;
    let mut reasons = BTreeSet::new();
    let mut paths: Vec<_> = fs::read_dir(&dir).map_err(|e| e.to_string())?.flatten().map(|e| e.path()).collect();
    paths.sort();
    for md in paths.iter().filter(|p| p.extension().is_some_and(|e| e == "md")) {
        let text = fs::read_to_string(md).map_err(|e| e.to_string())?;
        let labels = fs::read_to_string(md.with_extension("labels")).map_err(|e| format!("{}: {e}", md.display()))?;
        let extraction = Extraction::from_markdown(&text);
        let expected: Vec<&str> = labels.lines().filter(|l| !l.trim().is_empty()).collect();
        let name = md.file_name().unwrap().to_string_lossy();
        check(extraction.blocks.len() == expected.len(), || {
            format!("{name}: {} fences, labels list {}", extraction.blocks.len(), expected.len())
        })?;
        for (block, label) in extraction.blocks.iter().zip(&expected) {
            let mut parts = label.splitn(3, ' ');
            let ordinal: u32 = parts.next().unwrap().parse().map_err(|_| format!("{name}: bad label `{label}`"))?;
            let verdict = parts.next().unwrap_or("");
            let first_line = parts.next().unwrap_or("");
            check(block.ordinal == ordinal, || format!("{name}: fence {} labelled as {ordinal}", block.ordinal))?;
            match block.drop_reason {
                None => {
                    let got = block.text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
                    check(verdict == "kept" && got == first_line, || {
                        format!("{name} fence {ordinal}: kept `{got}`, label says `{label}`")
                    })?;
                }
                Some(reason) => {
                    reasons.insert(reason);
                    check(verdict == reason.as_str(), || format!("{name} fence {ordinal}: dropped as {reason}, label says `{label}`"))?;
                }
            }
            fences += 1;
        }
        readmes += 1;
    }
    check(readmes >= 30 && fences >= 100, || format!("corpus too small: {readmes} readmes, {fences} fences"))?;
    check(reasons.len() == DropReason::ALL.len(), || format!("drop reasons covered: {reasons:?}"))?;
    Ok(format!("{readmes} readmes, {fences} fences, all labels matched"))
}

// 2 ---------------------------------------------------------------------

fn stemmer_conformance() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/porter_vectors.txt");
    let data = fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let mut total = 0;
    let mut wrong = Vec::new();
    for line in data.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty()) {
        let (word, stem) = line.split_once(' ').ok_or_else(|| format!("bad vector line `{line}`"))?;
        total += 1;
        let got = porter_stem(word);
        if got != stem {
            wrong.push(format!("{word}->{got} (want {stem})"));
        }
    }
    check(total >= 200, || format!("only {total} vectors"))?;
    check(wrong.is_empty(), || format!("{} mismatches: {:?}", wrong.len(), &wrong[..wrong.len().min(5)]))?;
    Ok(format!("{total}/{total} reference stems"))
}

// 3 ---------------------------------------------------------------------

const VOCAB: &[&str] = &[
    "csv", "parse", "parser", "parsing", "json", "stream", "streams", "file", "files", "http", "request", "date",
    "format", "formatting", "color", "colors", "string", "array", "fast", "tiny", "the", "a", "and", "of", "for",
    "with", "to", "async", "promise", "cli", "Parse", "JSON", "write", "writer", "read",
];

fn random_text(rng: &mut StdRng, max: usize) -> String {
    let n = rng.gen_range(0..=max);
    (0..n).map(|_| *VOCAB.choose(rng).unwrap()).collect::<Vec<_>>().join(if rng.gen_bool(0.5) { " " } else { ", " })
}

fn search_equivalence() -> Outcome {
    let mut rng = StdRng::seed_from_u64(20_240_601);
    let mut non_empty = 0;
    for instance in 0..1000 {
        let n = rng.gen_range(0..=50);
        let mut records: Vec<PackageRecord> = (0..n)
            .map(|i| {
                let mut r = PackageRecord::for_readme(&format!("pkg-{i}"), "");
                r.description = random_text(&mut rng, 8);
                r.keywords = (0..rng.gen_range(0..3)).map(|_| random_text(&mut rng, 2)).collect();
                r.stars = if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..500) };
                r
            })
            .collect();
        let probabilities: BTreeMap<String, f64> =
            records.iter().map(|r| (r.name.clone(), f64::from(rng.gen_range(0..=20u32)) / 20.0)).collect();
        let query = random_text(&mut rng, 3);
        let index_of = |records: &[PackageRecord]| {
            let mut index = InvertedIndex::build(records);
            for (name, p) in &probabilities {
                index.set_probability(name, *p);
            }
            index
        };
        let index = index_of(&records);

        // Brute force: every query term appears among the package's terms.
        let wanted = tokenize(&query);
        let scan: BTreeSet<String> = records
            .iter()
            .filter(|r| {
                let terms = tokenize(&format!("{} {}", r.description, r.keywords.join(" ")));
                !wanted.is_empty() && wanted.iter().all(|t| terms.contains(t))
            })
            .map(|r| r.name.clone())
            .collect();

        for mode in [RankingMode::Runnability, RankingMode::Stars] {
            let got = match query_packages(&query, &index, mode) {
                Ok(r) => r,
                Err(_) if wanted.is_empty() => continue,
                Err(e) => return Err(format!("instance {instance}: `{query}` failed: {e}")),
            };
            let names: BTreeSet<String> = got.names().map(str::to_string).collect();
            check(names == scan, || format!("instance {instance}: `{query}` gave {names:?}, scan {scan:?}"))?;
            if mode == RankingMode::Runnability {
                if let Some(first_zero) = got.entries.iter().position(|e| e.stars == 0) {
                    check(got.entries[first_zero..].iter().all(|e| e.stars == 0), || {
                        format!("instance {instance}: starred package after a zero-star one")
                    })?;
                }
                check(got.entries.windows(2).all(|w| w[0].stars == 0 || w[1].stars == 0 || w[0].probability >= w[1].probability), || {
                    format!("instance {instance}: starred packages not ordered by probability")
                })?;
            } else {
                check(got.entries.windows(2).all(|w| w[0].stars >= w[1].stars), || format!("instance {instance}: stars not descending"))?;
            }
            // The ranking must not depend on the order records were indexed in.
            records.shuffle(&mut rng);
            let again = query_packages(&query, &index_of(&records), mode).map_err(|e| e.to_string())?;
            check(again == got, || format!("instance {instance}: ranking changed with input order"))?;
        }
        non_empty += usize::from(!scan.is_empty());
    }
    Ok(format!("1000 instances ({non_empty} with matches), candidates equal scan, zero-star partition and order invariance hold"))
}

// 4 ---------------------------------------------------------------------

fn correction_pipeline() -> Outcome {
    let root = common::fixtures().join("snippets");
    let mut total = 0;
    let mut categories = BTreeMap::new();
    let mut dirs: Vec<_> = fs::read_dir(&root).map_err(|e| e.to_string())?.flatten().map(|e| e.path()).collect();
    dirs.sort();
    for dir in dirs {
        let category = dir.file_name().unwrap().to_string_lossy().into_owned();
        let mut files: Vec<_> = fs::read_dir(&dir).map_err(|e| e.to_string())?.flatten().map(|e| e.path()).collect();
        files.sort();
        for file in files {
            let raw = fs::read_to_string(&file).map_err(|e| e.to_string())?;
            let id = format!("{category}/{}", file.file_name().unwrap().to_string_lossy());
            let report = correct_snippet(&raw);
            let mut previous = error_count(&lint(&raw, &LintConfig::default()));
            for stage in &report.stages {
                check(stage.errors_before == previous && stage.errors_after <= stage.errors_before, || {
                    format!("{id}: stage {:?} went {} -> {} after {previous}", stage.stage, stage.errors_before, stage.errors_after)
                })?;
                previous = stage.errors_after;
            }
            let relinted = error_count(&lint(&report.corrected, &LintConfig::default()));
            check(relinted == report.error_count, || format!("{id}: reported {} errors, relint finds {relinted}", report.error_count))?;
            check(report.error_count == 0 || report.comment_only, || format!("{id}: {} errors left", report.error_count))?;
            let again = correct_snippet(&report.corrected);
            check(again.corrected == report.corrected, || format!("{id}: not idempotent"))?;
            if let Some(d) = &report.deletion {
                check(restore_commented(&d.output, &d.commented_lines) == d.input, || format!("{id}: deletion not reversible"))?;
            }
            if category == "import-export" {
                check(report.error_count == 0 && !report.comment_only, || format!("{id}: import/export case not repaired"))?;
            }
            *categories.entry(category.clone()).or_insert(0) += 1;
            total += 1;
        }
    }
    check(total >= 60, || format!("only {total} snippets"))?;
    for needed in ["clean", "style", "eqeqeq", "semicolon", "import-export", "dup-args", "unparseable"] {
        check(categories.contains_key(needed), || format!("category {needed} missing"))?;
    }
    Ok(format!("{total} snippets in {} categories, import/export {}/{} error-free", categories.len(), categories["import-export"], categories["import-export"]))
}

// 5 ---------------------------------------------------------------------

fn sorting_law() -> Outcome {
    let mut rng = StdRng::seed_from_u64(5);
    for case in 0..10_000 {
        let n = rng.gen_range(0..20);
        let input: Vec<Snippet> = (0..n)
            .map(|i| Snippet {
                package_name: format!("p{}", rng.gen_range(0..3)),
                ordinal: rng.gen_range(0..8),
                raw_text: format!("s{i}"),
                correction: Some(SnippetCorrection {
                    corrected_text: String::new(),
                    error_count: rng.gen_range(0..4),
                    comment_only: rng.gen_bool(0.3),
                }),
            })
            .collect();
        let key = |s: &Snippet| {
            let c = s.correction.as_ref().unwrap();
            (c.comment_only, c.error_count, s.ordinal)
        };
        // Stable reference: order by (key, original position).
        let mut reference: Vec<(usize, Snippet)> = input.iter().cloned().enumerate().collect();
        reference.sort_by(|(i, a), (j, b)| key(a).cmp(&key(b)).then(i.cmp(j)));
        let reference: Vec<Snippet> = reference.into_iter().map(|(_, s)| s).collect();
        let got = sort_snippets(input);
        check(got == reference, || format!("case {case}: sort differs from the stable reference"))?;
    }
    Ok("10000 random cases match a stable sort by (comment_only, error_count, ordinal)".into())
}

// 6 ---------------------------------------------------------------------

fn forest_correctness() -> Outcome {
    let data = synthetic_rule_examples(1_000, 7);
    let hp = Hyperparams::default();
    let a = train_forest(&data, hp).map_err(|e| e.to_string())?.to_bytes();
    let b = train_forest(&data, hp).map_err(|e| e.to_string())?.to_bytes();
    check(a == b, || "two training runs produced different bytes".into())?;

    let one_class: Vec<LabeledExample> = data.iter().map(|e| LabeledExample { label: true, ..*e }).collect();
    let degenerate = train_forest(&one_class, Hyperparams { allow_single_class: true, ..hp }).map_err(|e| e.to_string())?;
    for e in data.iter().take(50) {
        let p = predict(&degenerate, &e.features).map_err(|e| e.to_string())?;
        check(p == 1.0, || format!("one-class model predicted {p}"))?;
    }

    let (train, test) = data.split_at(800);
    let model = train_forest(train, hp).map_err(|e| e.to_string())?;
    let mut correct = 0;
    for e in test {
        let p = predict(&model, &e.features).map_err(|e| e.to_string())?;
        correct += usize::from((p >= 0.5) == e.label);
    }
    let accuracy = correct as f64 / test.len() as f64;
    check(accuracy >= 0.9, || format!("held-out accuracy {accuracy:.3}"))?;

    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..10_000 {
        let fv = FeatureVector {
            has_license: rng.gen_range(0..2),
            has_readme: rng.gen_range(0..2),
            readme_lines: rng.gen_range(0..100_000),
            readme_code_blocks: rng.gen_range(0..500),
            js_snippet_count: rng.gen_range(0..500),
            has_run_example: rng.gen_range(0..2),
            has_install_example: rng.gen_range(0..2),
            days_since_update: rng.gen_range(0..u64::from(u32::MAX)),
        };
        let p = predict(&model, &fv).map_err(|e| e.to_string())?;
        check((0.0..=1.0).contains(&p), || format!("prediction {p} out of range"))?;
    }
    Ok(format!("deterministic, one-class p=1.0, held-out accuracy {accuracy:.3}, 10000 predictions in [0,1]"))
}

// 7 ---------------------------------------------------------------------

fn repl_end_to_end() -> Outcome {
    for tool in ["npm", "node"] {
        check(common::available(tool), || format!("`{tool}` is not available"))?;
    }
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let db = tmp.path().join("db");
    let workspace = tmp.path().join("ws");
    let fixtures = common::fixtures();
    let bin = env!("CARGO_BIN_EXE_snipkit");
    let mine = Command::new(bin).arg("mine").arg(fixtures.join("dump")).arg("--db").arg(&db).output().map_err(|e| e.to_string())?;
    check(mine.status.success(), || format!("mine failed: {}", String::from_utf8_lossy(&mine.stderr)))?;

    let run = Command::new(bin)
        .args(["repl", "--keep-env", "--offline"])
        .arg("--db")
        .arg(&db)
        .arg("--workspace")
        .arg(&workspace)
        .arg("--registry")
        .arg(fixtures.join("registry"))
        .arg("--transcript")
        .arg(fixtures.join("repl/session.txt"))
        .arg("--stub-sandbox")
        .arg(fixtures.join("repl/stub.json"))
        .env_remove("SNIPKIT_EDITOR")
        .output()
        .map_err(|e| e.to_string())?;
    let log: Vec<String> = String::from_utf8_lossy(&run.stdout).lines().map(str::to_string).collect();
    check(run.status.success(), || format!("repl exited with {}: {}", run.status, String::from_utf8_lossy(&run.stderr)))?;
    check(log.iter().any(|l| l == "sys| installed csv-kit"), || "csv-kit was not installed".into())?;
    check(!log.iter().any(|l| l.starts_with("err| ")), || format!("session reported errors: {log:?}"))?;
    let replayed = common::replay_console(&log).ok_or("no completed replay in the log")?;
    let env = common::environment_dir(&log).ok_or("no environment line in the log")?;

    let node = Command::new("node").arg("demo.js").current_dir(&env).output().map_err(|e| e.to_string())?;
    check(node.status.success(), || format!("node demo.js failed: {}", String::from_utf8_lossy(&node.stderr)))?;
    let printed: Vec<String> = String::from_utf8_lossy(&node.stdout).lines().map(str::to_string).collect();
    check(printed == replayed, || format!("node printed {printed:?}, replay printed {replayed:?}"))?;
    check(!replayed.is_empty(), || "replay printed nothing".into())?;
    Ok(format!("exit 0; saved file output equals replay output ({} lines)", printed.len()))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome, Duration); 7] = [
        (1, "extraction fidelity", extraction_fidelity, Duration::from_secs(5)),
        (2, "stemmer conformance", stemmer_conformance, Duration::MAX),
        (3, "search equivalence", search_equivalence, Duration::MAX),
        (4, "correction pipeline", correction_pipeline, Duration::MAX),
        (5, "sorting law", sorting_law, Duration::MAX),
        (6, "forest correctness", forest_correctness, Duration::MAX),
        (7, "REPL end-to-end", repl_end_to_end, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (n, name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or("panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {n} ({name}): PASS - {detail} [{elapsed:.2?}]"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} ({name}): FAIL - {why} [{elapsed:.2?}]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
