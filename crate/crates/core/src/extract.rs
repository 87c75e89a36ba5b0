//! Fenced code block extraction and JavaScript filtering for README markdown.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::record::PackageRecord;

/// Info-string tags accepted as JavaScript. Untagged blocks are also kept.
pub const JS_TAGS: &[&str] = &["js", "javascript", "jsx", "node", "es6", "mjs", "cjs"];

/// Leading words that mark a block as a shell transcript rather than code.
pub const COMMAND_WORDS: &[&str] = &["npm", "yarn", "node", "git", "cd", "curl"];

/// Prompt-like symbols; they only count when followed by whitespace or the
/// end of the line so that `$('#id')` or `#!` stay untouched.
pub const COMMAND_SYMBOLS: &[char] = &['$', '#', '>'];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    NonJsTag,
    CommandPrefix,
    JsonLiteral,
}

impl DropReason {
    pub const ALL: [DropReason; 3] = [Self::NonJsTag, Self::CommandPrefix, Self::JsonLiteral];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::NonJsTag => "non_js_tag",
            Self::CommandPrefix => "command_prefix",
            Self::JsonLiteral => "json_literal",
        }
    }
}

impl core::fmt::Display for DropReason {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One fenced block of a markdown document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FencedBlock {
    /// Position among all fences of the document, starting at 0.
    pub ordinal: u32,
    pub lang_tag: Option<String>,
    pub text: String,
    pub drop_reason: Option<DropReason>,
}

impl FencedBlock {
    pub fn is_kept(&self) -> bool {
        self.drop_reason.is_none()
    }
}

/// Output of the correction pipeline attached to a snippet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SnippetCorrection {
    pub corrected_text: String,
    pub error_count: u32,
    pub comment_only: bool,
}

/// A kept code block, identified by its package and fence ordinal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snippet {
    pub package_name: String,
    pub ordinal: u32,
    pub raw_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<SnippetCorrection>,
}

/// All fences of one README with their classification.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Extraction {
    pub blocks: Vec<FencedBlock>,
}

impl Extraction {
    pub fn from_markdown(markdown: &str) -> Self {
        let blocks = extract_fenced_blocks(markdown).into_iter().map(classify_block).collect();
        Self { blocks }
    }

    pub fn kept(&self) -> impl Iterator<Item = &FencedBlock> {
        self.blocks.iter().filter(|b| b.is_kept())
    }

    pub fn dropped(&self) -> impl Iterator<Item = &FencedBlock> {
        self.blocks.iter().filter(|b| !b.is_kept())
    }

    pub fn into_snippets(self, package_name: &str) -> Vec<Snippet> {
        self.blocks
            .into_iter()
            .filter(FencedBlock::is_kept)
            .map(|b| Snippet {
                package_name: package_name.to_string(),
                ordinal: b.ordinal,
                raw_text: b.text,
                correction: None,
            })
            .collect()
    }
}

struct OpenFence {
    marker: char,
    len: usize,
    indent: usize,
    lang_tag: Option<String>,
    lines: Vec<String>,
}

pub(crate) fn leading_ws(line: &str) -> usize {
    line.chars().take_while(|c| *c == ' ' || *c == '\t').count()
}

pub(crate) fn fence_run(s: &str) -> Option<(char, usize)> {
    let marker = s.chars().next().filter(|c| *c == '`' || *c == '~')?;
    let len = s.chars().take_while(|c| *c == marker).count();
    (len >= 3).then_some((marker, len))
}

/// Splits text into lines the way markdown sees them: `\n` separated with an
/// optional trailing `\r` removed.
pub(crate) fn md_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
}

/// Returns every backtick or tilde fence in document order.
///
/// An opening fence may be indented (fences nested in list items are common
/// in READMEs); content lines lose up to that much leading whitespace. A
/// fence left open runs to the end of the document.
pub fn extract_fenced_blocks(markdown: &str) -> Vec<FencedBlock> {
    let mut blocks = Vec::new();
    let mut open: Option<OpenFence> = None;

    let close = |fence: OpenFence, blocks: &mut Vec<FencedBlock>| {
        let ordinal = blocks.len() as u32;
        blocks.push(FencedBlock {
            ordinal,
            lang_tag: fence.lang_tag,
            text: fence.lines.join("\n"),
            drop_reason: None,
        });
    };

    for line in md_lines(markdown) {
        let indent = leading_ws(line);
        let rest = &line[indent..];
        match open.as_mut() {
            Some(fence) => {
                if let Some((marker, len)) = fence_run(rest) {
                    let tail = &rest[len * marker.len_utf8()..];
                    if marker == fence.marker && len >= fence.len && tail.trim().is_empty() {
                        let done = open.take().expect("open fence");
                        close(done, &mut blocks);
                        continue;
                    }
                }
                let strip = leading_ws(line).min(fence.indent);
                fence.lines.push(line[strip..].to_string());
            }
            None => {
                let Some((marker, len)) = fence_run(rest) else { continue };
                let info = rest[len * marker.len_utf8()..].trim();
                if marker == '`' && info.contains('`') {
                    continue;
                }
                let lang_tag = info
                    .split_whitespace()
                    .next()
                    .map(|t| t.to_lowercase())
                    .filter(|t| !t.is_empty());
                open = Some(OpenFence { marker, len, indent, lang_tag, lines: Vec::new() });
            }
        }
    }
    if let Some(fence) = open.take() {
        close(fence, &mut blocks);
    }
    blocks
}

fn starts_with_command(text: &str) -> bool {
    let Some(first) = text.lines().map(str::trim).find(|l| !l.is_empty()) else {
        return false;
    };
    if let Some(c) = first.chars().next() {
        if COMMAND_SYMBOLS.contains(&c) {
            let after = &first[c.len_utf8()..];
            if after.is_empty() || after.starts_with(char::is_whitespace) {
                return true;
            }
        }
    }
    let word = first.split_whitespace().next().unwrap_or("");
    COMMAND_WORDS.contains(&word)
}

fn is_json_literal(text: &str) -> bool {
    let trimmed = text.trim();
    if !(trimmed.starts_with('{') || trimmed.starts_with('[')) {
        return false;
    }
    matches!(
        serde_json::from_str::<serde_json::Value>(trimmed),
        Ok(serde_json::Value::Object(_) | serde_json::Value::Array(_))
    )
}

/// Sets `drop_reason` for blocks that are not JavaScript. Checks run in a
/// fixed order: tag, then command prefix, then JSON literal.
pub fn classify_block(mut block: FencedBlock) -> FencedBlock {
    block.drop_reason = if block.lang_tag.as_deref().is_some_and(|t| !JS_TAGS.contains(&t)) {
        Some(DropReason::NonJsTag)
    } else if starts_with_command(&block.text) {
        Some(DropReason::CommandPrefix)
    } else if is_json_literal(&block.text) {
        Some(DropReason::JsonLiteral)
    } else {
        None
    };
    block
}

/// Kept blocks of the record's README as snippets, fence ordinals preserved.
pub fn extract_snippets(record: &PackageRecord) -> Vec<Snippet> {
    Extraction::from_markdown(&record.readme_text).into_snippets(&record.name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(blocks: &[FencedBlock]) -> Vec<Option<&str>> {
        blocks.iter().map(|b| b.lang_tag.as_deref()).collect()
    }

    #[test]
    fn single_js_block() {
        let blocks = extract_fenced_blocks("```js\nlet a=1\n```");
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].lang_tag.as_deref(), Some("js"));
        assert_eq!(blocks[0].text, "let a=1");
    }

    #[test]
    fn untagged_and_bash_blocks() {
        let blocks = extract_fenced_blocks("text\n```\nx\n```\n```bash\nnpm i\n```");
        assert_eq!(blocks.iter().map(|b| b.ordinal).collect::<Vec<_>>(), [0, 1]);
        assert_eq!(tags(&blocks), [None, Some("bash")]);
    }

    #[test]
    fn unterminated_fence_runs_to_end() {
        let blocks = extract_fenced_blocks("```js\nunclosed");
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].text, "unclosed");
    }

    #[test]
    fn indented_code_is_ignored() {
        assert!(extract_fenced_blocks("para\n\n    const a = 1;\n").is_empty());
    }

    #[test]
    fn info_string_attributes_and_case() {
        let blocks = extract_fenced_blocks("``` JS linenos\na\n```\n~~~~javascript\nb\n~~~~");
        assert_eq!(tags(&blocks), [Some("js"), Some("javascript")]);
    }

    #[test]
    fn longer_fence_needs_longer_close() {
        let blocks = extract_fenced_blocks("````md\n```js\nx\n```\n````");
        assert_eq!(blocks.len(), 1);
        assert_eq!(blocks[0].text, "```js\nx\n```");
    }

    #[test]
    fn nested_list_fence_is_dedented() {
        let blocks = extract_fenced_blocks("1. step\n   ```js\n   foo();\n     bar();\n   ```");
        assert_eq!(blocks[0].text, "foo();\n  bar();");
    }

    #[test]
    fn inline_triple_backticks_are_not_fences() {
        assert!(extract_fenced_blocks("use ```js code``` inline").is_empty());
    }

    fn classify(tag: Option<&str>, text: &str) -> Option<DropReason> {
        classify_block(FencedBlock {
            ordinal: 0,
            lang_tag: tag.map(String::from),
            text: text.to_string(),
            drop_reason: None,
        })
        .drop_reason
    }

    #[test]
    fn classification_reasons() {
        assert_eq!(classify(Some("bash"), "echo hi"), Some(DropReason::NonJsTag));
        assert_eq!(classify(None, "npm install foo"), Some(DropReason::CommandPrefix));
        assert_eq!(classify(None, "{ \"a\": 1 }"), Some(DropReason::JsonLiteral));
        assert_eq!(classify(Some("js"), "const a = 1;"), None);
        assert_eq!(classify(None, "const a = 1;"), None);
    }

    #[test]
    fn command_prefix_edges() {
        assert_eq!(classify(None, "\n\n$ npm test"), Some(DropReason::CommandPrefix));
        assert_eq!(classify(None, "# build\nmake"), Some(DropReason::CommandPrefix));
        assert_eq!(classify(None, "> node app.js"), Some(DropReason::CommandPrefix));
        assert_eq!(classify(None, "$('#x').hide();"), None);
        assert_eq!(classify(None, "nodes.forEach(f);"), None);
        assert_eq!(classify(Some("node"), "node index.js"), Some(DropReason::CommandPrefix));
    }

    #[test]
    fn json_test_is_strict() {
        assert_eq!(classify(None, "[1, 2, 3]"), Some(DropReason::JsonLiteral));
        assert_eq!(classify(None, "{ a: 1 }"), None);
        assert_eq!(classify(None, "\"just a string\""), None);
        assert_eq!(classify(Some("js"), "  {\"k\": [true, null]}  \n"), Some(DropReason::JsonLiteral));
    }

    #[test]
    fn snippets_keep_fence_ordinals() {
        let md = "```js\na()\n```\n```bash\nls\n```\n```\nb()\n```\n";
        let record = PackageRecord::for_readme("demo", md);
        let snippets = extract_snippets(&record);
        assert_eq!(snippets.iter().map(|s| s.ordinal).collect::<Vec<_>>(), [0, 2]);
        assert!(snippets.iter().all(|s| s.package_name == "demo" && s.correction.is_none()));
    }

    #[test]
    fn no_fences_or_only_json() {
        assert!(extract_snippets(&PackageRecord::for_readme("a", "# title\ntext")).is_empty());
        assert!(extract_snippets(&PackageRecord::for_readme("a", "```\n{\"a\":1}\n```")).is_empty());
    }
}
