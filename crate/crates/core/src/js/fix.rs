//! Applying lint fixes until nothing is left to fix.

use alloc::string::String;
use alloc::vec::Vec;

use super::lint::{lint, LintConfig, TextEdit};

pub const MAX_FIX_PASSES: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixOutcome {
    pub text: String,
    /// Passes that changed the text.
    pub passes: u32,
    /// False when the pass bound was hit with fixes still pending.
    pub converged: bool,
}

/// Applies the edits that do not overlap an earlier one (by start offset).
/// Returns the new text and how many edits were applied.
pub fn apply_edits(source: &str, edits: &[TextEdit]) -> (String, usize) {
    let mut sorted: Vec<&TextEdit> = edits.iter().collect();
    sorted.sort_by_key(|e| (e.start, e.end));
    let mut out = String::with_capacity(source.len() + 16);
    let mut copied = 0usize;
    let mut applied = 0usize;
    let mut last_insert: Option<usize> = None;
    for edit in sorted {
        if edit.start < copied || edit.end > source.len() || edit.start > edit.end {
            continue;
        }
        // Two insertions at one point would be ambiguous; keep the first.
        if edit.start == edit.end && last_insert == Some(edit.start) {
            continue;
        }
        out.push_str(&source[copied..edit.start]);
        out.push_str(&edit.replacement);
        copied = edit.end;
        applied += 1;
        if edit.start == edit.end {
            last_insert = Some(edit.start);
        }
    }
    out.push_str(&source[copied..]);
    (out, applied)
}

/// Lint/fix loop, bounded by [`MAX_FIX_PASSES`].
pub fn fix_until_stable(source: &str) -> FixOutcome {
    let config = LintConfig::default();
    let mut text = String::from(source);
    for passes in 0..MAX_FIX_PASSES {
        let edits: Vec<TextEdit> = lint(&text, &config).into_iter().filter_map(|f| f.fix).collect();
        if edits.is_empty() {
            return FixOutcome { text, passes, converged: true };
        }
        text = apply_edits(&text, &edits).0;
    }
    let converged = lint(&text, &config).iter().all(|f| f.fix.is_none());
    FixOutcome { text, passes: MAX_FIX_PASSES, converged }
}

pub fn apply_fixes(source: &str) -> String {
    fix_until_stable(source).text
}
