//! JavaScript snippet tooling: a lossless tokenizer, a tolerant parser, a
//! small set of lint rules with fixes, and the correction pipeline built on
//! top of them.

mod correct;
mod deletion;
mod fix;
mod imports;
mod lexer;
mod lint;
mod parser;

pub use correct::{
    correct_snippet, correct_snippets, snippet_sort_key, sort_snippets, CorrectionReport, Stage,
    StageRecord,
};
pub use deletion::{
    is_comment_only, line_deletion, line_deletion_traced, restore_commented, DeletionOutcome,
    COMMENT_MARKER,
};
pub use fix::{apply_edits, apply_fixes, fix_until_stable, FixOutcome, MAX_FIX_PASSES};
pub use imports::rewrite_imports;
pub use lexer::{line_starts, significant_tokens, tokenize, Token, TokenKind};
pub use lint::{
    error_count, lint, LintConfig, LintFinding, Severity, TextEdit, INDENT_WIDTH, RULE_EQEQEQ,
    RULE_IMPORT_EXPORT, RULE_INDENT, RULE_NO_DUPE_ARGS, RULE_PARSE_ERROR, RULE_SEMI,
};
pub use parser::{
    parse, DefaultBody, ExportDecl, FunctionInfo, ImportDecl, MissingSemicolon, Param, ParseError,
    ParseErrorKind, ParseOutcome, SourceType, Span, Stmt, StmtKind,
};

/// Whether an interactive line should wait for more input: a bracket is
/// still open, or a template literal or block comment is unterminated.
pub fn needs_continuation(source: &str) -> bool {
    let mut depth = 0i64;
    for tok in tokenize(source) {
        match tok.kind {
            TokenKind::Punctuator => match tok.text {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            },
            TokenKind::Invalid => {
                if tok.text.starts_with('`') || tok.text.starts_with("/*") {
                    return true;
                }
            }
            _ => {}
        }
    }
    depth > 0
}
