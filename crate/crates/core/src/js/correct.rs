//! The full snippet repair pipeline and the ordering of repaired snippets.

use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use super::deletion::{is_comment_only, line_deletion_traced, DeletionOutcome};
use super::fix::fix_until_stable;
use super::imports::rewrite_imports;
use super::lint::{error_count, lint, LintConfig, RULE_IMPORT_EXPORT};
use crate::extract::{Snippet, SnippetCorrection};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    FixPass,
    ImportRewrite,
    LineDeletion,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageRecord {
    pub stage: Stage,
    pub errors_before: u32,
    pub errors_after: u32,
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorrectionReport {
    pub original: String,
    pub corrected: String,
    pub error_count: u32,
    pub comment_only: bool,
    pub stages: Vec<StageRecord>,
    /// A fix loop stopped at its pass bound with fixes still pending.
    pub fix_bound_hit: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub deletion: Option<DeletionOutcome>,
}

impl CorrectionReport {
    pub fn to_correction(&self) -> SnippetCorrection {
        SnippetCorrection {
            corrected_text: self.corrected.clone(),
            error_count: self.error_count,
            comment_only: self.comment_only,
        }
    }
}

struct Pipeline {
    text: String,
    errors: u32,
    stages: Vec<StageRecord>,
    fix_bound_hit: bool,
}

fn errors_of(text: &str) -> u32 {
    error_count(&lint(text, &LintConfig::default()))
}

impl Pipeline {
    /// Adopts `next` unless it would raise the error count.
    fn step(&mut self, stage: Stage, next: String) {
        let errors_after = errors_of(&next);
        let accepted = errors_after <= self.errors;
        let changed = accepted && next != self.text;
        self.stages.push(StageRecord {
            stage,
            errors_before: self.errors,
            errors_after: if accepted { errors_after } else { self.errors },
            changed,
        });
        if accepted {
            self.text = next;
            self.errors = errors_after;
        }
    }

    fn fix_pass(&mut self) {
        let outcome = fix_until_stable(&self.text);
        self.fix_bound_hit |= !outcome.converged;
        self.step(Stage::FixPass, outcome.text);
    }
}

/// Fix pass, then `import`→`require` when module syntax is the problem,
/// then line deletion for whatever still fails; every rewriting stage is
/// followed by another fix pass so the result is stable under a re-run.
pub fn correct_snippet(raw: &str) -> CorrectionReport {
    let mut p = Pipeline {
        text: String::from(raw),
        errors: errors_of(raw),
        stages: Vec::new(),
        fix_bound_hit: false,
    };
    p.fix_pass();

    let has_module_syntax = lint(&p.text, &LintConfig::default())
        .iter()
        .any(|f| f.rule_id == RULE_IMPORT_EXPORT);
    if has_module_syntax {
        let rewritten = rewrite_imports(&p.text);
        p.step(Stage::ImportRewrite, rewritten);
        p.fix_pass();
    }

    let mut deletion = None;
    if p.errors > 0 {
        let outcome = line_deletion_traced(&p.text);
        p.step(Stage::LineDeletion, outcome.output.clone());
        deletion = Some(outcome);
        p.fix_pass();
    }

    let findings = lint(&p.text, &LintConfig::default());
    CorrectionReport {
        original: String::from(raw),
        comment_only: is_comment_only(&p.text),
        error_count: error_count(&findings),
        corrected: p.text,
        stages: p.stages,
        fix_bound_hit: p.fix_bound_hit,
        deletion,
    }
}

/// Sort key: runnable-looking snippets first, fewer errors first, then
/// README order.
pub fn snippet_sort_key(snippet: &Snippet) -> (bool, u32, u32) {
    match &snippet.correction {
        Some(c) => (c.comment_only, c.error_count, snippet.ordinal),
        None => (false, u32::MAX, snippet.ordinal),
    }
}

/// Stable sort by [`snippet_sort_key`].
pub fn sort_snippets(mut snippets: Vec<Snippet>) -> Vec<Snippet> {
    snippets.sort_by_key(snippet_sort_key);
    snippets
}

/// Corrects every snippet in place.
pub fn correct_snippets(snippets: &mut [Snippet]) {
    for snippet in snippets {
        snippet.correction = Some(correct_snippet(&snippet.raw_text).to_correction());
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn snippet(ordinal: u32, error_count: u32, comment_only: bool) -> Snippet {
        Snippet {
            package_name: "p".into(),
            ordinal,
            raw_text: String::new(),
            correction: Some(SnippetCorrection { corrected_text: String::new(), error_count, comment_only }),
        }
    }

    #[test]
    fn import_snippet_is_rewritten() {
        let report = correct_snippet("import fs from 'fs'\nfs.readFileSync('x')");
        assert_eq!(report.corrected, "const fs = require('fs');\nfs.readFileSync('x');");
        assert_eq!(report.error_count, 0);
        assert!(!report.comment_only);
        assert!(report.stages.iter().any(|s| s.stage == Stage::ImportRewrite && s.changed));
        assert!(report.deletion.is_none());
    }

    #[test]
    fn clean_snippet_only_gets_style_fixes() {
        let report = correct_snippet("const a = 1\nif (a == 1) {\nlog(a)\n}");
        assert_eq!(report.corrected, "const a = 1;\nif (a === 1) {\n  log(a);\n}");
        assert_eq!(report.error_count, 0);
        assert_eq!(report.stages.len(), 1);
    }

    #[test]
    fn garbage_ends_comment_only() {
        let report = correct_snippet("((( \n )))");
        assert!(report.comment_only);
        assert_eq!(report.error_count, 0);
        assert!(report.deletion.is_some());
    }

    #[test]
    fn partially_broken_snippet_keeps_good_lines() {
        let report = correct_snippet("const x = require('x')\nx.run(}\nconsole.log('done')");
        assert_eq!(report.error_count, 0);
        assert!(!report.comment_only);
        assert!(report.corrected.contains("console.log('done');"));
    }

    #[test]
    fn pipeline_is_idempotent() {
        for src in ["import a from 'a'\nexport default a", "foo(;\nbar()", "x == y", "function f(a, a) {}"] {
            let once = correct_snippet(src);
            let twice = correct_snippet(&once.corrected);
            assert_eq!(twice.corrected, once.corrected, "{src:?}");
        }
    }

    #[test]
    fn sort_order() {
        let sorted = sort_snippets(vec![snippet(0, 2, false), snippet(1, 0, false), snippet(2, 0, true)]);
        assert_eq!(sorted.iter().map(|s| s.ordinal).collect::<Vec<_>>(), [1, 0, 2]);
        let sorted = sort_snippets(vec![snippet(3, 0, false), snippet(1, 0, false)]);
        assert_eq!(sorted.iter().map(|s| s.ordinal).collect::<Vec<_>>(), [1, 3]);
    }
}
