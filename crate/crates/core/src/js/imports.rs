//! Rewriting ES module syntax into CommonJS so a snippet runs as a script.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::fix::apply_edits;
use super::lint::TextEdit;
use super::parser::{parse, DefaultBody, ExportDecl, ImportDecl, SourceType, StmtKind};

fn import_replacement(decl: &ImportDecl) -> String {
    let source = &decl.source;
    let mut parts = Vec::new();
    if let Some(name) = &decl.default {
        parts.push(format!("const {name} = require({source});"));
    }
    if let Some(name) = &decl.namespace {
        parts.push(format!("const {name} = require({source});"));
    }
    if !decl.named.is_empty() {
        let fields: Vec<String> = decl
            .named
            .iter()
            .map(|(imported, local)| {
                if imported == local {
                    imported.clone()
                } else {
                    format!("{imported}: {local}")
                }
            })
            .collect();
        parts.push(format!("const {{{}}} = require({source});", fields.join(", ")));
    }
    if parts.is_empty() {
        parts.push(format!("require({source});"));
    }
    parts.join(" ")
}

/// Byte length of horizontal whitespace at the start of `s`.
fn blank_prefix(s: &str) -> usize {
    s.len() - s.trim_start_matches([' ', '\t']).len()
}

/// Replaces `import`/`export` statements by `require` calls and plain
/// declarations. Everything else is left byte-for-byte intact.
pub fn rewrite_imports(source: &str) -> String {
    let outcome = parse(source, SourceType::Module);
    let mut edits = Vec::new();
    for stmt in &outcome.statements {
        let (start, end) = (stmt.span.start, stmt.span.end);
        match &stmt.kind {
            StmtKind::Import(decl) => {
                edits.push(TextEdit { start, end, replacement: import_replacement(decl) })
            }
            StmtKind::Export(ExportDecl::Declaration { keyword }) => {
                let end = keyword.end + blank_prefix(&source[keyword.end..]);
                edits.push(TextEdit { start: keyword.start, end, replacement: String::new() });
            }
            StmtKind::Export(ExportDecl::Default { prefix, body, body_kind }) => match body_kind {
                DefaultBody::NeedsParens => {
                    let text = source[body.start..body.end].trim_end();
                    let text = text.strip_suffix(';').unwrap_or(text).trim_end();
                    edits.push(TextEdit { start, end, replacement: format!("({text});") });
                }
                DefaultBody::NamedDeclaration | DefaultBody::Expression => {
                    let end = prefix.end + blank_prefix(&source[prefix.end..]);
                    edits.push(TextEdit { start: prefix.start, end, replacement: String::new() });
                }
            },
            StmtKind::Export(ExportDecl::Named { source: from }) => {
                let replacement = from.as_ref().map(|m| format!("require({m});")).unwrap_or_default();
                edits.push(TextEdit { start, end, replacement });
            }
            StmtKind::Export(ExportDecl::All { source: from }) => {
                edits.push(TextEdit { start, end, replacement: format!("require({from});") });
            }
            _ => {}
        }
    }
    if edits.is_empty() {
        return String::from(source);
    }
    apply_edits(source, &edits).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn import_forms() {
        assert_eq!(rewrite_imports("import fs from \"fs\""), "const fs = require(\"fs\");");
        assert_eq!(rewrite_imports("import {x, y} from 'm'"), "const {x, y} = require('m');");
        assert_eq!(rewrite_imports("import * as N from 'm';"), "const N = require('m');");
        assert_eq!(rewrite_imports("import 'm'"), "require('m');");
        assert_eq!(rewrite_imports("import {a as b} from 'm'"), "const {a: b} = require('m');");
        assert_eq!(
            rewrite_imports("import d, {e} from 'm'"),
            "const d = require('m'); const {e} = require('m');"
        );
    }

    #[test]
    fn export_forms() {
        assert_eq!(rewrite_imports("export const a = 1;"), "const a = 1;");
        assert_eq!(rewrite_imports("export default function f() {}"), "function f() {}");
        assert_eq!(rewrite_imports("export default function () {}"), "(function () {});");
        assert_eq!(rewrite_imports("export default {a: 1};"), "({a: 1});");
        assert_eq!(rewrite_imports("export default x + 1"), "x + 1");
        assert_eq!(rewrite_imports("const a = 1\nexport { a }\n"), "const a = 1\n\n");
        assert_eq!(rewrite_imports("export * from 'm'"), "require('m');");
        assert_eq!(rewrite_imports("export { a } from 'm';"), "require('m');");
    }

    #[test]
    fn other_code_is_untouched() {
        let src = "const a = require('a')\n\n  foo( a ) // keep\n";
        assert_eq!(rewrite_imports(src), src);
        assert_eq!(
            rewrite_imports("import fs from 'fs'\nfs.readFileSync('x')"),
            "const fs = require('fs');\nfs.readFileSync('x')"
        );
    }
}
