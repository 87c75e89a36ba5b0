//! The snippet rule set.
//!
//! Errors mark code that probably will not run: parse errors, `import` /
//! `export` in a script and duplicate parameter names. Warnings are style
//! issues that come with a fix: `==`/`!=`, missing semicolons and
//! indentation (two spaces, `case` indented inside `switch`).
//!
//! As with most linters, a snippet that does not parse only gets its parse
//! findings; the other rules need a tree.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::Serialize;

use super::lexer::{line_starts, tokenize, Token, TokenKind};
use super::parser::{parse, ParseErrorKind, SourceType};

pub const RULE_PARSE_ERROR: &str = "parse-error";
pub const RULE_IMPORT_EXPORT: &str = "import-export-in-script";
pub const RULE_NO_DUPE_ARGS: &str = "no-dupe-args";
pub const RULE_EQEQEQ: &str = "eqeqeq";
pub const RULE_SEMI: &str = "semi";
pub const RULE_INDENT: &str = "indent";

pub const INDENT_WIDTH: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// Replace `source[start..end]` with `replacement`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TextEdit {
    pub start: usize,
    pub end: usize,
    pub replacement: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LintFinding {
    pub rule_id: &'static str,
    pub severity: Severity,
    pub line: u32,
    pub column: u32,
    pub message: String,
    pub fixable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fix: Option<TextEdit>,
}

impl LintFinding {
    fn error(rule_id: &'static str, line: u32, column: u32, message: String) -> Self {
        Self { rule_id, severity: Severity::Error, line, column, message, fixable: false, fix: None }
    }

    fn warning(rule_id: &'static str, line: u32, column: u32, message: String, fix: TextEdit) -> Self {
        Self { rule_id, severity: Severity::Warning, line, column, message, fixable: true, fix: Some(fix) }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// Parse-class finding (including module syntax in a script).
    pub fn is_parse_error(&self) -> bool {
        self.rule_id == RULE_PARSE_ERROR || self.rule_id == RULE_IMPORT_EXPORT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LintConfig {
    pub source_type: SourceType,
}

impl Default for LintConfig {
    fn default() -> Self {
        Self { source_type: SourceType::Script }
    }
}

/// Lints `source`; findings come back ordered by position.
pub fn lint(source: &str, config: &LintConfig) -> Vec<LintFinding> {
    let outcome = parse(source, config.source_type);
    let mut findings = Vec::new();
    if !outcome.is_clean() {
        for err in &outcome.parse_errors {
            let rule = match err.kind {
                ParseErrorKind::ModuleSyntaxInScript => RULE_IMPORT_EXPORT,
                ParseErrorKind::Syntax => RULE_PARSE_ERROR,
            };
            findings.push(LintFinding::error(rule, err.line, err.column, err.message.clone()));
        }
        return findings;
    }

    for func in &outcome.functions {
        for (i, param) in func.params.iter().enumerate() {
            let first = func.params.iter().position(|p| p.name == param.name);
            if first != Some(i) {
                continue;
            }
            if let Some(dup) = func.params[i + 1..].iter().find(|p| p.name == param.name) {
                findings.push(LintFinding::error(
                    RULE_NO_DUPE_ARGS,
                    dup.line,
                    dup.column,
                    format!("Duplicate param '{}'.", param.name),
                ));
            }
        }
    }

    let tokens = tokenize(source);
    for tok in &tokens {
        if tok.kind == TokenKind::Punctuator && (tok.text == "==" || tok.text == "!=") {
            let replacement = format!("{}=", tok.text);
            findings.push(LintFinding::warning(
                RULE_EQEQEQ,
                tok.line,
                tok.column,
                format!("Expected '{}' and instead saw '{}'.", replacement, tok.text),
                TextEdit { start: tok.start, end: tok.end(), replacement },
            ));
        }
    }

    for missing in &outcome.missing_semicolons {
        findings.push(LintFinding::warning(
            RULE_SEMI,
            missing.line,
            missing.column,
            "Missing semicolon.".into(),
            TextEdit { start: missing.offset, end: missing.offset, replacement: ";".into() },
        ));
    }

    indentation(source, &tokens, &mut findings);

    findings.sort_by(|a, b| {
        (a.line, a.column, a.rule_id).cmp(&(b.line, b.column, b.rule_id))
    });
    findings
}

pub fn error_count(findings: &[LintFinding]) -> u32 {
    findings.iter().filter(|f| f.is_error()).count() as u32
}

#[derive(Clone, Copy)]
struct Opener {
    line: usize,
    is_switch_body: bool,
    /// For `(`: directly preceded by `switch`.
    is_switch_head: bool,
}

fn is_closer(tok: &Token) -> bool {
    tok.kind == TokenKind::Punctuator && matches!(tok.text, "}" | ")" | "]")
}

/// Expected indentation per line, in columns.
///
/// A line is indented one step past the line holding its innermost open
/// bracket, a line starting with a closer lines up with its opener's line,
/// `case` bodies and `.`-chained lines get one extra step. Only lines that
/// begin a statement or list element are checked; other continuation lines
/// keep whatever indentation they have, and so do comment lines and lines
/// that start inside a multi-line token.
fn indentation(source: &str, tokens: &[Token], findings: &mut Vec<LintFinding>) {
    let starts = line_starts(source);
    let line_count = starts.len();
    let mut first: Vec<Option<usize>> = vec![None; line_count];
    let mut owner: Vec<Option<usize>> = vec![None; line_count];
    for (i, tok) in tokens.iter().enumerate() {
        if matches!(tok.kind, TokenKind::Whitespace | TokenKind::Eof) {
            continue;
        }
        let line = tok.line as usize - 1;
        if first[line].is_none() && owner[line].is_none() && tok.start >= starts[line] {
            first[line] = Some(i);
        }
        if tok.kind != TokenKind::Newline {
            let root = owner[line].unwrap_or(line);
            for k in 1..=tok.newlines() as usize {
                if let Some(slot) = owner.get_mut(line + k) {
                    *slot = Some(root);
                }
            }
        }
    }

    let mut expected = vec![0usize; line_count];
    let mut stack: Vec<Opener> = Vec::new();
    let mut prev: Option<Token> = None;
    let mut last_closed_switch_head = false;
    let mut cursor = 0usize;

    for line in 0..line_count {
        if let Some(root) = owner[line] {
            expected[line] = expected[root];
        } else if let Some(fi) = first[line] {
            let tok = tokens[fi];
            let actual = &source[starts[line]..tok.start];
            let actual_width = actual.chars().count();
            let target = match tok.kind {
                TokenKind::Newline | TokenKind::Comment => None,
                _ => expected_indent(&tok, prev.as_ref(), &stack, &expected),
            };
            match target {
                Some(want) => {
                    expected[line] = want;
                    if actual.len() != want || actual.bytes().any(|b| b != b' ') {
                        findings.push(LintFinding::warning(
                            RULE_INDENT,
                            tok.line,
                            0,
                            format!(
                                "Expected indentation of {} spaces but found {}.",
                                want, actual_width
                            ),
                            TextEdit {
                                start: starts[line],
                                end: tok.start,
                                replacement: " ".repeat(want),
                            },
                        ));
                    }
                }
                None => expected[line] = actual_width,
            }
        }

        // Feed this line's tokens through the bracket stack.
        let line_end = starts.get(line + 1).copied().unwrap_or(usize::MAX);
        while cursor < tokens.len() && tokens[cursor].start < line_end {
            let tok = tokens[cursor];
            cursor += 1;
            if tok.kind.is_trivia() || tok.kind == TokenKind::Eof {
                continue;
            }
            if tok.kind == TokenKind::Punctuator {
                let at = tok.line as usize - 1;
                match tok.text {
                    "(" => stack.push(Opener {
                        line: at,
                        is_switch_body: false,
                        is_switch_head: prev.is_some_and(|p| p.is_keyword("switch")),
                    }),
                    "[" => stack.push(Opener { line: at, is_switch_body: false, is_switch_head: false }),
                    "{" => stack.push(Opener {
                        line: at,
                        is_switch_body: prev.is_some_and(|p| p.is_punct(")")) && last_closed_switch_head,
                        is_switch_head: false,
                    }),
                    "}" | ")" | "]" => {
                        if let Some(open) = stack.pop() {
                            last_closed_switch_head = open.is_switch_head;
                        }
                    }
                    _ => {}
                }
            }
            prev = Some(tok);
        }
    }
}

fn expected_indent(first: &Token, prev: Option<&Token>, stack: &[Opener], expected: &[usize]) -> Option<usize> {
    if is_closer(first) {
        return Some(stack.last().map_or(0, |open| expected[open.line]));
    }
    let innermost = stack.last();
    let mut base = innermost.map_or(0, |open| expected[open.line] + INDENT_WIDTH);
    let in_switch = innermost.is_some_and(|open| open.is_switch_body);
    let is_case = first.is_keyword("case") || first.is_keyword("default");
    if in_switch && !is_case {
        base += INDENT_WIDTH;
    }
    if first.is_punct(".") || first.is_punct("?.") {
        return Some(base + INDENT_WIDTH);
    }
    let starts_element = match prev {
        None => true,
        Some(p) if p.kind == TokenKind::Punctuator => match p.text {
            ";" | "{" | "}" => true,
            "," | "(" | "[" => !stack.is_empty(),
            ":" => in_switch,
            _ => false,
        },
        _ => false,
    };
    starts_element.then_some(base)
}
