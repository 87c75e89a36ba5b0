//! Commenting out the lines that keep a snippet from linting clean.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::Serialize;

use super::lexer::line_starts;
use super::lint::{lint, LintConfig};

/// Prepended at column 0 of every line the deletion pass disables.
pub const COMMENT_MARKER: &str = "// ";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeletionOutcome {
    pub input: String,
    pub output: String,
    /// 1-based line numbers that received the marker, ascending.
    pub commented_lines: Vec<u32>,
    pub iterations: u32,
}

fn lines_of(text: &str) -> Vec<&str> {
    let starts = line_starts(text);
    starts
        .iter()
        .enumerate()
        .map(|(i, &s)| &text[s..starts.get(i + 1).copied().unwrap_or(text.len())])
        .collect()
}

fn is_blank(line: &str) -> bool {
    line.trim().is_empty()
}

fn is_commented(line: &str) -> bool {
    line.trim_start().starts_with("//")
}

/// True when every non-blank line starts with `//` (after indentation).
/// An empty snippet counts as comment-only: there is nothing left to run.
pub fn is_comment_only(text: &str) -> bool {
    lines_of(text).into_iter().all(|l| is_blank(l) || is_commented(l))
}

fn comment_out(text: &str, lines: &BTreeSet<usize>) -> String {
    let mut out = String::with_capacity(text.len() + lines.len() * COMMENT_MARKER.len());
    for (i, line) in lines_of(text).into_iter().enumerate() {
        if lines.contains(&i) {
            out.push_str(COMMENT_MARKER);
        }
        out.push_str(line);
    }
    out
}

/// Repeatedly comments out every line that carries an error finding until
/// the snippet lints without errors or no further line can be commented.
///
/// When the offending line is already commented (the error sits after a
/// multi-line token that started higher up) the nearest uncommented line
/// above it is disabled instead, so each round makes progress and the loop
/// runs at most once per line.
pub fn line_deletion_traced(source: &str) -> DeletionOutcome {
    let config = LintConfig::default();
    let mut text = String::from(source);
    let mut commented: BTreeSet<usize> = BTreeSet::new();
    let mut iterations = 0u32;
    loop {
        let findings = lint(&text, &config);
        let error_lines: BTreeSet<usize> =
            findings.iter().filter(|f| f.is_error()).map(|f| f.line as usize - 1).collect();
        if error_lines.is_empty() {
            break;
        }
        let lines = lines_of(&text);
        let mut targets = BTreeSet::new();
        for &line in &error_lines {
            let candidate = (0..=line.min(lines.len() - 1))
                .rev()
                .find(|&i| !is_blank(lines[i]) && !is_commented(lines[i]) && !targets.contains(&i));
            if let Some(i) = candidate {
                targets.insert(i);
            }
        }
        if targets.is_empty() {
            break;
        }
        iterations += 1;
        text = comment_out(&text, &targets);
        commented.extend(targets);
    }
    DeletionOutcome {
        input: String::from(source),
        output: text,
        commented_lines: commented.into_iter().map(|i| i as u32 + 1).collect(),
        iterations,
    }
}

pub fn line_deletion(source: &str) -> String {
    line_deletion_traced(source).output
}

/// Removes the marker from the given 1-based lines.
pub fn restore_commented(text: &str, commented_lines: &[u32]) -> String {
    let mut out = String::with_capacity(text.len());
    for (i, line) in lines_of(text).into_iter().enumerate() {
        let restore = commented_lines.binary_search(&(i as u32 + 1)).is_ok();
        out.push_str(if restore { line.strip_prefix(COMMENT_MARKER).unwrap_or(line) } else { line });
    }
    out
}
