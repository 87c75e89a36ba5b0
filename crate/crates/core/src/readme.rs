//! README-derived package statistics.

use serde::{Deserialize, Serialize};

use crate::extract::{fence_run, leading_ws, md_lines, Extraction};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadmeStats {
    pub line_count: u32,
    /// Fenced blocks of any language.
    pub code_block_count: u32,
    pub js_snippet_count: u32,
    pub has_install_example: bool,
    pub has_run_example: bool,
}

/// Text of every markdown heading outside fenced code. ATX (`# x`) and
/// Setext (`x` underlined with `===` or `---`) headings are recognised.
fn headings(markdown: &str) -> impl Iterator<Item = &str> {
    let mut fence: Option<(char, usize)> = None;
    let mut prev_paragraph: Option<&str> = None;
    md_lines(markdown).filter_map(move |line| {
        let rest = &line[leading_ws(line)..];
        if let Some((marker, len)) = fence {
            if let Some((m, l)) = fence_run(rest) {
                if m == marker && l >= len && rest[l * m.len_utf8()..].trim().is_empty() {
                    fence = None;
                }
            }
            return None;
        }
        if let Some((marker, len)) = fence_run(rest) {
            if !(marker == '`' && rest[len..].contains('`')) {
                fence = Some((marker, len));
                prev_paragraph = None;
                return None;
            }
        }
        let indent = line.len() - line.trim_start_matches(' ').len();
        let trimmed = line.trim();
        if indent <= 3 && trimmed.starts_with('#') {
            let hashes = trimmed.chars().take_while(|c| *c == '#').count();
            let after = &trimmed[hashes..];
            if hashes <= 6 && (after.is_empty() || after.starts_with([' ', '\t'])) {
                prev_paragraph = None;
                return Some(after);
            }
        }
        let underline = !trimmed.is_empty()
            && indent <= 3
            && (trimmed.chars().all(|c| c == '=') || trimmed.chars().all(|c| c == '-'));
        if underline {
            if let Some(text) = prev_paragraph.take() {
                return Some(text);
            }
            return None;
        }
        prev_paragraph = (!trimmed.is_empty()).then_some(trimmed);
        None
    })
}

pub fn compute_readme_stats(readme_text: &str) -> ReadmeStats {
    let extraction = Extraction::from_markdown(readme_text);
    let mut has_install_example = readme_text.contains("npm install");
    let mut has_run_example = readme_text.contains("npm run");
    for heading in headings(readme_text) {
        let lower = heading.to_lowercase();
        has_install_example |= lower.contains("install");
        has_run_example |= lower.contains("usage");
    }
    ReadmeStats {
        line_count: md_lines(readme_text).count() as u32,
        code_block_count: extraction.blocks.len() as u32,
        js_snippet_count: extraction.kept().count() as u32,
        has_install_example,
        has_run_example,
    }
}
