//! Corpus-level summaries: dataset statistics and the lint-error breakdown.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use snipkit_core::js::{correct_snippet, lint, LintConfig, Stage};
use snipkit_core::CorpusStats;

/// Lint-error distribution over a set of snippets. Shares are fractions in
/// `[0, 1]`; `None` means the denominator was empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub snippets: u64,
    /// Raw snippets with at least one error finding.
    pub with_errors: u64,
    pub with_errors_share: Option<f64>,
    /// Of the erroneous raw snippets, those with a parse-class error.
    pub parse_error_share: Option<f64>,
    /// Snippets still erroneous once module syntax is rewritten.
    pub after_import_rewrite_share: Option<f64>,
    /// Snippets without errors after the whole pipeline.
    pub error_free_share: Option<f64>,
    /// Of the snippets that went through line deletion, those left
    /// comment-only (0 when none did).
    pub comment_only_share: f64,
}

#[derive(Default)]
struct Tally {
    with_errors: u64,
    with_parse_errors: u64,
    after_rewrite: u64,
    error_free: u64,
    deleted: u64,
    deleted_comment_only: u64,
}

fn tally(raw: &str) -> Tally {
    let findings = lint(raw, &LintConfig::default());
    let errors: Vec<_> = findings.iter().filter(|f| f.is_error()).collect();
    let report = correct_snippet(raw);
    let after_rewrite = report
        .stages
        .iter()
        .take_while(|s| s.stage != Stage::LineDeletion)
        .last()
        .map_or(errors.len() as u32, |s| s.errors_after);
    let deleted = report.stages.iter().any(|s| s.stage == Stage::LineDeletion);
    Tally {
        with_errors: u64::from(!errors.is_empty()),
        with_parse_errors: u64::from(errors.iter().any(|f| f.is_parse_error())),
        after_rewrite: u64::from(after_rewrite > 0),
        error_free: u64::from(report.error_count == 0),
        deleted: u64::from(deleted),
        deleted_comment_only: u64::from(deleted && report.comment_only),
    }
}

fn share(n: u64, d: u64) -> Option<f64> {
    (d > 0).then(|| n as f64 / d as f64)
}

pub fn error_report<'a>(raw_snippets: impl IntoParallelIterator<Item = &'a str>) -> ErrorReport {
    let tallies: Vec<Tally> = raw_snippets.into_par_iter().map(tally).collect();
    let n = tallies.len() as u64;
    let sum = |f: fn(&Tally) -> u64| tallies.iter().map(f).sum::<u64>();
    let with_errors = sum(|t| t.with_errors);
    let deleted = sum(|t| t.deleted);
    ErrorReport {
        snippets: n,
        with_errors,
        with_errors_share: share(with_errors, n),
        parse_error_share: share(sum(|t| t.with_parse_errors), with_errors),
        after_import_rewrite_share: share(sum(|t| t.after_rewrite), n),
        error_free_share: share(sum(|t| t.error_free), n),
        comment_only_share: share(sum(|t| t.deleted_comment_only), deleted).unwrap_or(0.0),
    }
}

pub fn percent(value: Option<f64>) -> String {
    value.map_or_else(|| "—".to_string(), |v| format!("{:.1}%", v * 100.0))
}

pub fn render_error_report(r: &ErrorReport) -> String {
    let rows = [
        ("snippets", r.snippets.to_string()),
        ("with lint errors", percent(r.with_errors_share)),
        ("  of which parse errors", percent(r.parse_error_share)),
        ("with errors after import rewrite", percent(r.after_import_rewrite_share)),
        ("error-free after pipeline", percent(r.error_free_share)),
        ("comment-only after line deletion", percent(Some(r.comment_only_share))),
    ];
    render_rows(&rows)
}

pub fn render_stats(s: &CorpusStats) -> String {
    let rows = [
        ("total_packages", s.total_packages.to_string()),
        ("packages_with_readme", s.packages_with_readme.to_string()),
        ("packages_with_nonempty_readme", s.packages_with_nonempty_readme.to_string()),
        ("packages_with_snippets", s.packages_with_snippets.to_string()),
        ("total_snippets", s.total_snippets.to_string()),
    ];
    render_rows(&rows)
}

fn render_rows(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (key, value) in rows {
        let _ = writeln!(out, "{key:<width$}  {value}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_clean() {
        let r = error_report(vec!["const a = 1;", "foo();"]);
        assert_eq!(
            [percent(r.with_errors_share), percent(r.parse_error_share), percent(r.after_import_rewrite_share), percent(r.error_free_share), percent(Some(r.comment_only_share))],
            ["0.0%", "—", "0.0%", "100.0%", "0.0%"]
        );
    }

    #[test]
    fn mixed() {
        let r = error_report(vec!["import a from 'a'", "((( ", "function f(a, a) {}", "ok();\n)))"]);
        assert_eq!(r.with_errors, 4);
        assert_eq!(r.parse_error_share, Some(0.75));
        assert_eq!(r.after_import_rewrite_share, Some(0.75));
        assert_eq!(r.error_free_share, Some(1.0));
        assert_eq!(r.comment_only_share, 2.0 / 3.0);
    }

    #[test]
    fn stats_are_aligned() {
        let text = render_stats(&CorpusStats { total_packages: 3, ..Default::default() });
        assert!(text.starts_with("total_packages                 3\n"));
    }
}
