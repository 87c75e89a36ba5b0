//! Error-recovering recursive-descent parser for the JavaScript subset found
//! in README snippets.
//!
//! Expressions are validated but not kept: the tree records statements,
//! import/export shapes, function parameter lists and the places where a
//! semicolon was inserted automatically. That is all the lint rules need.
//! After an error the parser skips to the next statement boundary (`;`, a
//! line break at the statement's bracket depth, or the enclosing `}`) and
//! carries on, so one snippet can report several errors.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::Serialize;

use super::lexer::{tokenize, Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceType {
    Script,
    Module,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseErrorKind {
    Syntax,
    /// `import`/`export` declaration parsed in script mode.
    ModuleSyntaxInScript,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub line: u32,
    pub column: u32,
    pub offset: usize,
    pub message: String,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImportDecl {
    /// Module specifier exactly as written, quotes included.
    pub source: String,
    pub default: Option<String>,
    pub namespace: Option<String>,
    /// `(imported, local)` pairs of a `{ ... }` clause.
    pub named: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExportDecl {
    /// `export var|let|const|function|class ...`; `keyword` covers `export`.
    Declaration { keyword: Span },
    /// `export default ...`; `prefix` covers `export default`.
    Default { prefix: Span, body: Span, body_kind: DefaultBody },
    /// `export { a, b as c }` with an optional `from` clause.
    Named { source: Option<String> },
    /// `export * from 'm'` or `export * as ns from 'm'`.
    All { source: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DefaultBody {
    /// Named function or class declaration.
    NamedDeclaration,
    /// Anonymous function or class, or an expression starting with `{`.
    NeedsParens,
    Expression,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StmtKind {
    Empty,
    Block(Vec<Stmt>),
    Variable { kind: String, names: Vec<String> },
    Function { name: Option<String> },
    Class { name: Option<String> },
    If { consequent: Vec<Stmt>, alternate: Vec<Stmt> },
    Loop(Vec<Stmt>),
    Switch(Vec<Stmt>),
    Try(Vec<Stmt>),
    Return,
    Throw,
    Break,
    Continue,
    Labeled(Vec<Stmt>),
    With(Vec<Stmt>),
    Debugger,
    Expression,
    Import(ImportDecl),
    Export(ExportDecl),
    /// Region skipped while recovering from an error.
    Invalid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Param {
    pub name: String,
    pub line: u32,
    pub column: u32,
}

/// A function, method or arrow with its simple (identifier) parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FunctionInfo {
    pub name: Option<String>,
    pub is_arrow: bool,
    pub params: Vec<Param>,
    pub line: u32,
    pub column: u32,
}

/// Place where a statement ended without its semicolon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MissingSemicolon {
    /// Byte offset right after the statement's last token.
    pub offset: usize,
    pub line: u32,
    pub column: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ParseOutcome {
    pub statements: Vec<Stmt>,
    pub parse_errors: Vec<ParseError>,
    pub functions: Vec<FunctionInfo>,
    pub missing_semicolons: Vec<MissingSemicolon>,
}

impl ParseOutcome {
    pub fn is_clean(&self) -> bool {
        self.parse_errors.is_empty()
    }
}

/// Marker that an error was recorded and the current statement is abandoned.
struct Abort;

type PResult<T> = Result<T, Abort>;

#[derive(Clone, Copy)]
struct Tok<'a> {
    tok: Token<'a>,
    newline_before: bool,
}

const ASSIGN_OPS: &[&str] = &[
    "=", "+=", "-=", "*=", "/=", "%=", "**=", "<<=", ">>=", ">>>=", "&=", "|=", "^=", "&&=", "||=",
    "??=",
];

struct Parser<'a> {
    toks: Vec<Tok<'a>>,
    pos: usize,
    source_type: SourceType,
    depth: usize,
    function_depth: usize,
    out: ParseOutcome,
    /// Error already recorded for the statement being parsed.
    failed: bool,
}

fn binary_precedence(tok: &Token, no_in: bool) -> Option<u8> {
    let prec = match (tok.kind, tok.text) {
        (TokenKind::Punctuator, "??") => 1,
        (TokenKind::Punctuator, "||") => 2,
        (TokenKind::Punctuator, "&&") => 3,
        (TokenKind::Punctuator, "|") => 4,
        (TokenKind::Punctuator, "^") => 5,
        (TokenKind::Punctuator, "&") => 6,
        (TokenKind::Punctuator, "==" | "!=" | "===" | "!==") => 7,
        (TokenKind::Punctuator, "<" | ">" | "<=" | ">=") => 8,
        (TokenKind::Keyword, "instanceof") => 8,
        (TokenKind::Keyword, "in") if !no_in => 8,
        (TokenKind::Punctuator, "<<" | ">>" | ">>>") => 9,
        (TokenKind::Punctuator, "+" | "-") => 10,
        (TokenKind::Punctuator, "*" | "/" | "%") => 11,
        (TokenKind::Punctuator, "**") => 12,
        _ => return None,
    };
    Some(prec)
}

impl<'a> Parser<'a> {
    fn new(source: &'a str, source_type: SourceType) -> Self {
        let mut toks = Vec::new();
        let mut newline_before = false;
        for tok in tokenize(source) {
            match tok.kind {
                TokenKind::Newline => newline_before = true,
                TokenKind::Whitespace => {}
                TokenKind::Comment => newline_before |= tok.newlines() > 0,
                _ => {
                    toks.push(Tok { tok, newline_before });
                    newline_before = false;
                }
            }
        }
        Self {
            toks,
            pos: 0,
            source_type,
            depth: 0,
            function_depth: 0,
            out: ParseOutcome::default(),
            failed: false,
        }
    }

    // ---- token access ----

    fn cur(&self) -> Token<'a> {
        self.toks[self.pos].tok
    }

    fn nth(&self, n: usize) -> Token<'a> {
        self.toks[(self.pos + n).min(self.toks.len() - 1)].tok
    }

    fn newline_before(&self) -> bool {
        self.toks[self.pos].newline_before
    }

    fn at_eof(&self) -> bool {
        self.cur().kind == TokenKind::Eof
    }

    fn at_punct(&self, p: &str) -> bool {
        self.cur().is_punct(p)
    }

    fn at_keyword(&self, k: &str) -> bool {
        self.cur().is_keyword(k)
    }

    fn at_ident(&self, name: &str) -> bool {
        self.cur().is(TokenKind::Identifier, name)
    }

    fn prev_end(&self) -> usize {
        if self.pos == 0 {
            0
        } else {
            self.toks[self.pos - 1].tok.end()
        }
    }

    fn bump(&mut self) -> Token<'a> {
        let tok = self.cur();
        if tok.kind == TokenKind::Punctuator {
            match tok.text {
                "{" | "(" | "[" => self.depth += 1,
                "}" | ")" | "]" => self.depth = self.depth.saturating_sub(1),
                _ => {}
            }
        }
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
        }
        tok
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, k: &str) -> bool {
        if self.at_keyword(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            self.unexpected()
        }
    }

    // ---- errors ----

    fn error_at(&mut self, index: usize, message: String, kind: ParseErrorKind) {
        let tok = self.toks[index].tok;
        let (line, column, offset) = if tok.kind == TokenKind::Eof && index > 0 {
            let last = self.toks[index - 1].tok;
            let tail = last.text.rsplit(['\n', '\r']).next().unwrap_or("");
            let column = if last.newlines() == 0 {
                last.column + last.text.chars().count() as u32
            } else {
                tail.chars().count() as u32
            };
            (last.line + last.newlines(), column, last.end())
        } else {
            (tok.line, tok.column, tok.start)
        };
        self.out.parse_errors.push(ParseError { line, column, offset, message, kind });
    }

    fn error<T>(&mut self, message: String) -> PResult<T> {
        if !self.failed {
            self.error_at(self.pos, message, ParseErrorKind::Syntax);
            self.failed = true;
        }
        Err(Abort)
    }

    fn unexpected<T>(&mut self) -> PResult<T> {
        let tok = self.cur();
        let message = match tok.kind {
            TokenKind::Eof => "Unexpected end of input".to_string(),
            TokenKind::Invalid => match tok.text.chars().next() {
                Some('\'' | '"') => "Unterminated string constant".to_string(),
                Some('`') => "Unterminated template".to_string(),
                Some('/') if tok.text.starts_with("/*") => "Unterminated comment".to_string(),
                Some('/') => "Unterminated regular expression".to_string(),
                _ => "Invalid or unexpected token".to_string(),
            },
            _ => format!("Unexpected token `{}`", tok.text),
        };
        self.error(message)
    }

    /// Skips to the next statement boundary after an error.
    fn recover(&mut self, start_pos: usize, start_depth: usize) {
        if self.pos == start_pos {
            self.bump();
        }
        let mut depth = self.depth.saturating_sub(start_depth);
        loop {
            let tok = self.cur();
            if tok.kind == TokenKind::Eof {
                break;
            }
            if depth == 0 && self.pos > start_pos && self.newline_before() {
                break;
            }
            if tok.kind == TokenKind::Punctuator {
                match tok.text {
                    ";" if depth == 0 => {
                        self.bump();
                        break;
                    }
                    "}" if depth == 0 && start_depth > 0 => break,
                    "{" | "(" | "[" => depth += 1,
                    "}" | ")" | "]" => depth = depth.saturating_sub(1),
                    _ => {}
                }
            }
            self.pos += 1;
        }
        self.depth = start_depth;
    }

    // ---- statements ----

    /// Parses statements until `}` (when `in_block`) or end of input.
    fn statement_list(&mut self, in_block: bool, top_level: bool) -> Vec<Stmt> {
        let mut list = Vec::new();
        loop {
            if self.at_eof() || (in_block && self.at_punct("}")) {
                return list;
            }
            let start_pos = self.pos;
            let start_depth = self.depth;
            self.failed = false;
            match self.statement(top_level) {
                Ok(stmt) => list.push(stmt),
                Err(Abort) => {
                    let tok = self.toks[start_pos].tok;
                    self.recover(start_pos, start_depth);
                    list.push(Stmt {
                        kind: StmtKind::Invalid,
                        span: Span { start: tok.start, end: self.prev_end().max(tok.start) },
                        line: tok.line,
                    });
                }
            }
            self.failed = false;
        }
    }

    fn finish(&self, kind: StmtKind, start: Token<'a>) -> Stmt {
        Stmt { kind, span: Span { start: start.start, end: self.prev_end() }, line: start.line }
    }

    fn consume_semicolon(&mut self) -> PResult<()> {
        if self.eat_punct(";") {
            return Ok(());
        }
        if self.at_eof() || self.at_punct("}") || self.newline_before() {
            self.note_missing_semicolon();
            return Ok(());
        }
        self.unexpected()
    }

    fn note_missing_semicolon(&mut self) {
        if self.pos == 0 {
            return;
        }
        let last = self.toks[self.pos - 1].tok;
        let (line, column) = if last.newlines() == 0 {
            (last.line, last.column + last.text.chars().count() as u32)
        } else {
            let tail = last.text.rsplit(['\n', '\r']).next().unwrap_or("");
            (last.line + last.newlines(), tail.chars().count() as u32)
        };
        self.out.missing_semicolons.push(MissingSemicolon { offset: last.end(), line, column });
    }

    fn statement(&mut self, top_level: bool) -> PResult<Stmt> {
        let start = self.cur();
        match (start.kind, start.text) {
            (TokenKind::Punctuator, "{") => {
                let body = self.block()?;
                Ok(self.finish(StmtKind::Block(body), start))
            }
            (TokenKind::Punctuator, ";") => {
                self.bump();
                Ok(self.finish(StmtKind::Empty, start))
            }
            (TokenKind::Keyword, "var" | "const") => self.variable_statement(start),
            (TokenKind::Keyword, "let")
                if matches!(self.nth(1).kind, TokenKind::Identifier | TokenKind::Keyword)
                    || self.nth(1).is_punct("[")
                    || self.nth(1).is_punct("{") =>
            {
                self.variable_statement(start)
            }
            (TokenKind::Keyword, "function") => {
                let name = self.function(false, true)?;
                Ok(self.finish(StmtKind::Function { name }, start))
            }
            (TokenKind::Identifier, "async")
                if self.nth(1).is_keyword("function") && !self.toks[self.pos + 1].newline_before =>
            {
                self.bump();
                let name = self.function(false, true)?;
                Ok(self.finish(StmtKind::Function { name }, start))
            }
            (TokenKind::Keyword, "class") => {
                let name = self.class(true)?;
                Ok(self.finish(StmtKind::Class { name }, start))
            }
            (TokenKind::Keyword, "if") => {
                self.bump();
                self.paren_expression()?;
                let consequent = self.statement(false)?;
                let alternate = if self.eat_keyword("else") {
                    alloc::vec![self.statement(false)?]
                } else {
                    Vec::new()
                };
                Ok(self.finish(StmtKind::If { consequent: alloc::vec![consequent], alternate }, start))
            }
            (TokenKind::Keyword, "for") => self.for_statement(start),
            (TokenKind::Keyword, "while") => {
                self.bump();
                self.paren_expression()?;
                let body = self.statement(false)?;
                Ok(self.finish(StmtKind::Loop(alloc::vec![body]), start))
            }
            (TokenKind::Keyword, "do") => {
                self.bump();
                let body = self.statement(false)?;
                if !self.eat_keyword("while") {
                    return self.unexpected();
                }
                self.paren_expression()?;
                if !self.eat_punct(";") {
                    self.note_missing_semicolon();
                }
                Ok(self.finish(StmtKind::Loop(alloc::vec![body]), start))
            }
            (TokenKind::Keyword, "return") => {
                if self.function_depth == 0 {
                    return self.error("Illegal return statement".to_string());
                }
                self.bump();
                if !self.at_statement_end() {
                    self.expression(false)?;
                }
                self.consume_semicolon()?;
                Ok(self.finish(StmtKind::Return, start))
            }
            (TokenKind::Keyword, "throw") => {
                self.bump();
                if self.newline_before() {
                    return self.error("Illegal newline after throw".to_string());
                }
                self.expression(false)?;
                self.consume_semicolon()?;
                Ok(self.finish(StmtKind::Throw, start))
            }
            (TokenKind::Keyword, kw @ ("break" | "continue")) => {
                self.bump();
                if self.cur().kind == TokenKind::Identifier && !self.newline_before() {
                    self.bump();
                }
                self.consume_semicolon()?;
                let kind = if kw == "break" { StmtKind::Break } else { StmtKind::Continue };
                Ok(self.finish(kind, start))
            }
            (TokenKind::Keyword, "try") => self.try_statement(start),
            (TokenKind::Keyword, "switch") => self.switch_statement(start),
            (TokenKind::Keyword, "with") => {
                self.bump();
                self.paren_expression()?;
                let body = self.statement(false)?;
                Ok(self.finish(StmtKind::With(alloc::vec![body]), start))
            }
            (TokenKind::Keyword, "debugger") => {
                self.bump();
                self.consume_semicolon()?;
                Ok(self.finish(StmtKind::Debugger, start))
            }
            (TokenKind::Keyword, "import")
                if !(self.nth(1).is_punct("(") || self.nth(1).is_punct(".")) =>
            {
                self.module_item_guard(top_level)?;
                let decl = self.import_declaration()?;
                Ok(self.finish(StmtKind::Import(decl), start))
            }
            (TokenKind::Keyword, "export") => {
                self.module_item_guard(top_level)?;
                let decl = self.export_declaration()?;
                Ok(self.finish(StmtKind::Export(decl), start))
            }
            (TokenKind::Identifier, _) if self.nth(1).is_punct(":") => {
                self.bump();
                self.bump();
                let body = self.statement(false)?;
                Ok(self.finish(StmtKind::Labeled(alloc::vec![body]), start))
            }
            _ => {
                self.expression(false)?;
                self.consume_semicolon()?;
                Ok(self.finish(StmtKind::Expression, start))
            }
        }
    }

    /// Rejects nested module items and records the script-mode error for
    /// top-level ones (which are then parsed normally).
    fn module_item_guard(&mut self, top_level: bool) -> PResult<()> {
        if !top_level {
            return self.error(format!("`{}` may only appear at the top level", self.cur().text));
        }
        if self.source_type == SourceType::Script {
            self.error_at(
                self.pos,
                "'import' and 'export' may appear only with 'sourceType: module'".to_string(),
                ParseErrorKind::ModuleSyntaxInScript,
            );
        }
        Ok(())
    }

    fn at_statement_end(&self) -> bool {
        self.at_punct(";") || self.at_punct("}") || self.at_eof() || self.newline_before()
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect_punct("{")?;
        let body = self.statement_list(true, false);
        self.expect_punct("}")?;
        Ok(body)
    }

    fn function_body(&mut self) -> PResult<()> {
        self.function_depth += 1;
        let result = self.block();
        self.function_depth -= 1;
        result.map(|_| ())
    }

    fn paren_expression(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        self.expression(false)?;
        self.expect_punct(")")
    }

    fn variable_statement(&mut self, start: Token<'a>) -> PResult<Stmt> {
        let kind = self.bump().text.to_string();
        let names = self.declarators(&kind, false)?;
        self.consume_semicolon()?;
        Ok(self.finish(StmtKind::Variable { kind, names }, start))
    }

    /// Declarator list; a missing `const` initializer is an error unless the
    /// list heads a `for-in`/`for-of`.
    fn declarators(&mut self, kind: &str, in_for: bool) -> PResult<Vec<String>> {
        let mut names = Vec::new();
        loop {
            self.binding_target(&mut names, &mut Vec::new())?;
            if self.eat_punct("=") {
                self.assignment(in_for)?;
            } else if kind == "const"
                && !(in_for && (self.at_keyword("in") || self.at_ident("of")))
            {
                return self.error("Missing initializer in const declaration".to_string());
            }
            if !self.eat_punct(",") {
                return Ok(names);
            }
        }
    }

    fn for_statement(&mut self, start: Token<'a>) -> PResult<Stmt> {
        self.bump();
        if self.at_ident("await") || self.at_keyword("await") {
            self.bump();
        }
        self.expect_punct("(")?;
        let is_decl = self.at_keyword("var")
            || self.at_keyword("const")
            || (self.at_keyword("let")
                && (matches!(self.nth(1).kind, TokenKind::Identifier | TokenKind::Keyword)
                    || self.nth(1).is_punct("[")
                    || self.nth(1).is_punct("{")));
        if is_decl {
            let kind = self.bump().text.to_string();
            self.declarators(&kind, true)?;
        } else if !self.at_punct(";") {
            self.expression(true)?;
        }
        if self.eat_keyword("in") || (self.at_ident("of") && { self.bump(); true }) {
            self.assignment(false)?;
            self.expect_punct(")")?;
        } else {
            self.expect_punct(";")?;
            if !self.at_punct(";") {
                self.expression(false)?;
            }
            self.expect_punct(";")?;
            if !self.at_punct(")") {
                self.expression(false)?;
            }
            self.expect_punct(")")?;
        }
        let body = self.statement(false)?;
        Ok(self.finish(StmtKind::Loop(alloc::vec![body]), start))
    }

    fn try_statement(&mut self, start: Token<'a>) -> PResult<Stmt> {
        self.bump();
        let mut body = self.block()?;
        let mut handled = false;
        if self.eat_keyword("catch") {
            handled = true;
            if self.eat_punct("(") {
                self.binding_target(&mut Vec::new(), &mut Vec::new())?;
                self.expect_punct(")")?;
            }
            body.extend(self.block()?);
        }
        if self.eat_keyword("finally") {
            handled = true;
            body.extend(self.block()?);
        }
        if !handled {
            return self.error("Missing catch or finally after try".to_string());
        }
        Ok(self.finish(StmtKind::Try(body), start))
    }

    fn switch_statement(&mut self, start: Token<'a>) -> PResult<Stmt> {
        self.bump();
        self.paren_expression()?;
        self.expect_punct("{")?;
        let mut body = Vec::new();
        while !self.at_punct("}") {
            if self.eat_keyword("case") {
                self.expression(false)?;
            } else if !self.eat_keyword("default") {
                return self.unexpected();
            }
            self.expect_punct(":")?;
            while !(self.at_keyword("case")
                || self.at_keyword("default")
                || self.at_punct("}")
                || self.at_eof())
            {
                let start_pos = self.pos;
                let start_depth = self.depth;
                match self.statement(false) {
                    Ok(stmt) => body.push(stmt),
                    Err(Abort) => {
                        self.recover(start_pos, start_depth);
                        self.failed = false;
                    }
                }
            }
            if self.at_eof() {
                return self.unexpected();
            }
        }
        self.bump();
        Ok(self.finish(StmtKind::Switch(body), start))
    }

    fn module_specifier(&mut self) -> PResult<String> {
        if self.cur().kind == TokenKind::String {
            Ok(self.bump().text.to_string())
        } else {
            self.unexpected()
        }
    }

    fn module_name(&mut self) -> PResult<String> {
        match self.cur().kind {
            TokenKind::Identifier | TokenKind::Keyword | TokenKind::String => {
                Ok(self.bump().text.to_string())
            }
            _ => self.unexpected(),
        }
    }

    fn binding_identifier(&mut self) -> PResult<String> {
        let tok = self.cur();
        let ok = tok.kind == TokenKind::Identifier
            || (tok.kind == TokenKind::Keyword && matches!(tok.text, "let" | "yield" | "await"));
        if ok && !tok.text.starts_with('#') {
            self.bump();
            Ok(tok.text.to_string())
        } else {
            self.unexpected()
        }
    }

    fn import_declaration(&mut self) -> PResult<ImportDecl> {
        self.bump();
        let mut decl = ImportDecl { source: String::new(), default: None, namespace: None, named: Vec::new() };
        if self.cur().kind == TokenKind::String {
            decl.source = self.module_specifier()?;
            self.consume_semicolon()?;
            return Ok(decl);
        }
        if matches!(self.cur().kind, TokenKind::Identifier | TokenKind::Keyword) && !self.at_punct("{") {
            decl.default = Some(self.binding_identifier()?);
            if !self.eat_punct(",") {
                return self.import_from(decl);
            }
        }
        if self.eat_punct("*") {
            if !self.at_ident("as") {
                return self.unexpected();
            }
            self.bump();
            decl.namespace = Some(self.binding_identifier()?);
        } else if self.eat_punct("{") {
            while !self.eat_punct("}") {
                let imported = self.module_name()?;
                let local = if self.at_ident("as") {
                    self.bump();
                    self.binding_identifier()?
                } else {
                    imported.clone()
                };
                decl.named.push((imported, local));
                if !self.eat_punct(",") {
                    self.expect_punct("}")?;
                    break;
                }
            }
        } else {
            return self.unexpected();
        }
        self.import_from(decl)
    }

    fn import_from(&mut self, mut decl: ImportDecl) -> PResult<ImportDecl> {
        if !self.at_ident("from") {
            return self.unexpected();
        }
        self.bump();
        decl.source = self.module_specifier()?;
        self.consume_semicolon()?;
        Ok(decl)
    }

    fn export_declaration(&mut self) -> PResult<ExportDecl> {
        let export_tok = self.bump();
        let keyword = Span { start: export_tok.start, end: export_tok.end() };
        let cur = self.cur();
        if cur.is_keyword("default") {
            self.bump();
            let prefix = Span { start: export_tok.start, end: self.prev_end() };
            let body_start = self.cur();
            let is_fn = body_start.is_keyword("function")
                || (body_start.is(TokenKind::Identifier, "async") && self.nth(1).is_keyword("function"));
            let body_kind = if is_fn || body_start.is_keyword("class") {
                let name = if body_start.is_keyword("class") {
                    self.class(false)?
                } else {
                    if !body_start.is_keyword("function") {
                        self.bump();
                    }
                    self.function(false, false)?
                };
                if name.is_some() {
                    DefaultBody::NamedDeclaration
                } else {
                    DefaultBody::NeedsParens
                }
            } else {
                let kind = if body_start.is_punct("{") { DefaultBody::NeedsParens } else { DefaultBody::Expression };
                self.assignment(false)?;
                self.consume_semicolon()?;
                kind
            };
            let body = Span { start: body_start.start, end: self.prev_end() };
            return Ok(ExportDecl::Default { prefix, body, body_kind });
        }
        if self.eat_punct("*") {
            if self.at_ident("as") {
                self.bump();
                self.module_name()?;
            }
            if !self.at_ident("from") {
                return self.unexpected();
            }
            self.bump();
            let source = self.module_specifier()?;
            self.consume_semicolon()?;
            return Ok(ExportDecl::All { source });
        }
        if self.eat_punct("{") {
            while !self.eat_punct("}") {
                self.module_name()?;
                if self.at_ident("as") {
                    self.bump();
                    self.module_name()?;
                }
                if !self.eat_punct(",") {
                    self.expect_punct("}")?;
                    break;
                }
            }
            let source = if self.at_ident("from") {
                self.bump();
                Some(self.module_specifier()?)
            } else {
                None
            };
            self.consume_semicolon()?;
            return Ok(ExportDecl::Named { source });
        }
        let start = self.cur();
        match (cur.kind, cur.text) {
            (TokenKind::Keyword, "var" | "let" | "const") => {
                self.variable_statement(start)?;
            }
            (TokenKind::Keyword, "function") => {
                self.function(false, true)?;
            }
            (TokenKind::Identifier, "async") if self.nth(1).is_keyword("function") => {
                self.bump();
                self.function(false, true)?;
            }
            (TokenKind::Keyword, "class") => {
                self.class(true)?;
            }
            _ => return self.unexpected(),
        }
        Ok(ExportDecl::Declaration { keyword })
    }

    // ---- functions and classes ----

    /// Parses `function [*] [name] (params) { body }` starting at `function`.
    fn function(&mut self, is_expression: bool, require_name: bool) -> PResult<Option<String>> {
        let fn_tok = self.bump();
        self.eat_punct("*");
        let name = if self.cur().kind == TokenKind::Identifier
            || (self.cur().kind == TokenKind::Keyword && matches!(self.cur().text, "yield" | "await" | "let"))
        {
            Some(self.bump().text.to_string())
        } else if require_name && !is_expression {
            return self.unexpected();
        } else {
            None
        };
        self.function_rest(name.clone(), fn_tok)?;
        Ok(name)
    }

    /// Parameters and body of a function or method.
    fn function_rest(&mut self, name: Option<String>, at: Token<'a>) -> PResult<()> {
        let params = self.formal_params()?;
        self.out.functions.push(FunctionInfo {
            name,
            is_arrow: false,
            params,
            line: at.line,
            column: at.column,
        });
        self.function_body()
    }

    fn formal_params(&mut self) -> PResult<Vec<Param>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        while !self.eat_punct(")") {
            self.eat_punct("...");
            self.binding_element(&mut Vec::new(), &mut params)?;
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(params)
    }

    fn class(&mut self, require_name: bool) -> PResult<Option<String>> {
        self.bump();
        let name = if self.cur().kind == TokenKind::Identifier {
            Some(self.bump().text.to_string())
        } else if require_name {
            return self.unexpected();
        } else {
            None
        };
        if self.eat_keyword("extends") {
            self.lhs_expression()?;
        }
        self.class_body()?;
        Ok(name)
    }

    fn class_body(&mut self) -> PResult<()> {
        self.expect_punct("{")?;
        loop {
            if self.eat_punct("}") {
                return Ok(());
            }
            if self.eat_punct(";") {
                continue;
            }
            let member_start = self.cur();
            if self.at_ident("static") && self.nth(1).is_punct("{") {
                self.bump();
                self.function_body()?;
                continue;
            }
            let mut modifiers_done = false;
            while !modifiers_done {
                let next = self.nth(1);
                let next_is_name = !(next.is_punct("(") || next.is_punct("=") || next.is_punct(";") || next.is_punct("}"))
                    && !self.toks[(self.pos + 1).min(self.toks.len() - 1)].newline_before;
                if (self.at_ident("static") || self.at_ident("async") || self.at_ident("get") || self.at_ident("set"))
                    && next_is_name
                {
                    self.bump();
                } else if self.at_punct("*") {
                    self.bump();
                } else {
                    modifiers_done = true;
                }
            }
            let name = self.property_name()?;
            if self.at_punct("(") {
                self.function_rest(name, member_start)?;
            } else {
                if self.eat_punct("=") {
                    self.function_depth += 1;
                    let r = self.assignment(false);
                    self.function_depth -= 1;
                    r?;
                }
                self.consume_semicolon()?;
            }
        }
    }

    /// Property key; returns its name when it is a plain identifier.
    fn property_name(&mut self) -> PResult<Option<String>> {
        let tok = self.cur();
        match tok.kind {
            TokenKind::Identifier | TokenKind::Keyword => {
                self.bump();
                Ok(Some(tok.text.to_string()))
            }
            TokenKind::String | TokenKind::Number => {
                self.bump();
                Ok(None)
            }
            TokenKind::Punctuator if tok.text == "[" => {
                self.bump();
                self.assignment(false)?;
                self.expect_punct("]")?;
                Ok(None)
            }
            _ => self.unexpected(),
        }
    }

    // ---- binding patterns ----

    /// Identifier, array pattern or object pattern. Simple names go to
    /// `params` (with positions) and every bound name to `names`.
    fn binding_target(&mut self, names: &mut Vec<String>, params: &mut Vec<Param>) -> PResult<()> {
        let tok = self.cur();
        if tok.is_punct("[") {
            self.bump();
            while !self.eat_punct("]") {
                if self.eat_punct(",") {
                    continue;
                }
                self.eat_punct("...");
                self.binding_element(names, &mut Vec::new())?;
                if !self.eat_punct(",") {
                    self.expect_punct("]")?;
                    break;
                }
            }
            return Ok(());
        }
        if tok.is_punct("{") {
            self.bump();
            while !self.eat_punct("}") {
                if self.eat_punct("...") {
                    self.binding_target(names, &mut Vec::new())?;
                } else {
                    let key = self.cur();
                    let name = self.property_name()?;
                    if self.eat_punct(":") {
                        self.binding_element(names, &mut Vec::new())?;
                    } else {
                        let Some(name) = name.filter(|_| key.kind == TokenKind::Identifier || key.is_keyword("let")) else {
                            return self.unexpected();
                        };
                        names.push(name);
                        if self.eat_punct("=") {
                            self.assignment(false)?;
                        }
                    }
                }
                if !self.eat_punct(",") {
                    self.expect_punct("}")?;
                    break;
                }
            }
            return Ok(());
        }
        let name = self.binding_identifier()?;
        params.push(Param { name: name.clone(), line: tok.line, column: tok.column });
        names.push(name);
        Ok(())
    }

    fn binding_element(&mut self, names: &mut Vec<String>, params: &mut Vec<Param>) -> PResult<()> {
        self.binding_target(names, params)?;
        if self.eat_punct("=") {
            self.assignment(false)?;
        }
        Ok(())
    }

    // ---- expressions ----

    fn expression(&mut self, no_in: bool) -> PResult<()> {
        self.assignment(no_in)?;
        while self.eat_punct(",") {
            self.assignment(no_in)?;
        }
        Ok(())
    }

    /// Index of the `)` matching the `(` at `self.pos`.
    fn matching_paren(&self) -> Option<usize> {
        let mut depth = 0usize;
        for (i, t) in self.toks.iter().enumerate().skip(self.pos) {
            if t.tok.kind == TokenKind::Punctuator {
                match t.tok.text {
                    "(" | "[" | "{" => depth += 1,
                    ")" | "]" | "}" => {
                        depth -= 1;
                        if depth == 0 {
                            return (t.tok.text == ")").then_some(i);
                        }
                    }
                    _ => {}
                }
            }
            if t.tok.kind == TokenKind::Eof {
                return None;
            }
        }
        None
    }

    fn arrow_follows_parens(&self) -> bool {
        self.matching_paren().is_some_and(|close| {
            let next = &self.toks[(close + 1).min(self.toks.len() - 1)];
            next.tok.is_punct("=>") && !next.newline_before
        })
    }

    fn arrow_body(&mut self, no_in: bool) -> PResult<()> {
        if self.at_punct("{") {
            self.function_body()
        } else {
            self.function_depth += 1;
            let r = self.assignment(no_in);
            self.function_depth -= 1;
            r
        }
    }

    /// Tries the arrow-function forms at the current position.
    fn try_arrow(&mut self, no_in: bool) -> PResult<bool> {
        let tok = self.cur();
        let is_async = tok.is(TokenKind::Identifier, "async") && !self.toks[(self.pos + 1).min(self.toks.len() - 1)].newline_before;
        let offset = usize::from(is_async);
        let head = self.nth(offset);
        let simple_param = matches!(head.kind, TokenKind::Identifier)
            || (head.kind == TokenKind::Keyword && matches!(head.text, "yield" | "await" | "let"));
        if simple_param && self.nth(offset + 1).is_punct("=>") {
            if is_async {
                self.bump();
            }
            let p = self.bump();
            self.bump();
            self.out.functions.push(FunctionInfo {
                name: None,
                is_arrow: true,
                params: alloc::vec![Param { name: p.text.to_string(), line: p.line, column: p.column }],
                line: tok.line,
                column: tok.column,
            });
            self.arrow_body(no_in)?;
            return Ok(true);
        }
        if head.is_punct("(") {
            let saved = self.pos;
            self.pos += offset;
            if self.arrow_follows_parens() {
                let params = self.formal_params()?;
                self.bump();
                self.out.functions.push(FunctionInfo {
                    name: None,
                    is_arrow: true,
                    params,
                    line: tok.line,
                    column: tok.column,
                });
                self.arrow_body(no_in)?;
                return Ok(true);
            }
            self.pos = saved;
        }
        Ok(false)
    }

    fn assignment(&mut self, no_in: bool) -> PResult<()> {
        if self.try_arrow(no_in)? {
            return Ok(());
        }
        if self.at_keyword("yield") {
            self.bump();
            self.eat_punct("*");
            if !self.at_statement_end() && !self.at_punct(")") && !self.at_punct("]") && !self.at_punct(",") && !self.at_punct(":") {
                self.assignment(no_in)?;
            }
            return Ok(());
        }
        self.conditional(no_in)?;
        let tok = self.cur();
        if tok.kind == TokenKind::Punctuator && ASSIGN_OPS.contains(&tok.text) {
            self.bump();
            self.assignment(no_in)?;
        }
        Ok(())
    }

    fn conditional(&mut self, no_in: bool) -> PResult<()> {
        self.binary(0, no_in)?;
        if self.eat_punct("?") {
            self.assignment(false)?;
            self.expect_punct(":")?;
            self.assignment(no_in)?;
        }
        Ok(())
    }

    fn binary(&mut self, min_prec: u8, no_in: bool) -> PResult<()> {
        self.unary()?;
        while let Some(prec) = binary_precedence(&self.cur(), no_in) {
            if prec <= min_prec {
                break;
            }
            let right_assoc = self.at_punct("**");
            self.bump();
            self.binary(if right_assoc { prec - 1 } else { prec }, no_in)?;
        }
        Ok(())
    }

    fn unary(&mut self) -> PResult<()> {
        let tok = self.cur();
        let prefix = match tok.kind {
            TokenKind::Punctuator => matches!(tok.text, "!" | "~" | "+" | "-" | "++" | "--"),
            TokenKind::Keyword => matches!(tok.text, "typeof" | "void" | "delete" | "await"),
            _ => false,
        };
        if prefix {
            self.bump();
            return self.unary();
        }
        self.lhs_expression()?;
        if (self.at_punct("++") || self.at_punct("--")) && !self.newline_before() {
            self.bump();
        }
        Ok(())
    }

    fn arguments(&mut self) -> PResult<()> {
        self.expect_punct("(")?;
        while !self.eat_punct(")") {
            self.eat_punct("...");
            self.assignment(false)?;
            if !self.eat_punct(",") {
                self.expect_punct(")")?;
                break;
            }
        }
        Ok(())
    }

    fn member_name(&mut self) -> PResult<()> {
        match self.cur().kind {
            TokenKind::Identifier | TokenKind::Keyword => {
                self.bump();
                Ok(())
            }
            _ => self.unexpected(),
        }
    }

    fn lhs_expression(&mut self) -> PResult<()> {
        if self.at_keyword("new") {
            self.bump();
            if self.eat_punct(".") {
                self.member_name()?;
            } else {
                self.new_callee()?;
                if self.at_punct("(") {
                    self.arguments()?;
                }
            }
        } else {
            self.primary()?;
        }
        self.call_tail(true)
    }

    /// Callee of `new`: a member expression without calls.
    fn new_callee(&mut self) -> PResult<()> {
        if self.at_keyword("new") {
            self.bump();
            self.new_callee()?;
            if self.at_punct("(") {
                self.arguments()?;
            }
            return Ok(());
        }
        self.primary()?;
        self.call_tail(false)
    }

    fn call_tail(&mut self, allow_calls: bool) -> PResult<()> {
        loop {
            let tok = self.cur();
            match (tok.kind, tok.text) {
                (TokenKind::Punctuator, ".") => {
                    self.bump();
                    self.member_name()?;
                }
                (TokenKind::Punctuator, "?.") if allow_calls => {
                    self.bump();
                    if self.at_punct("(") {
                        self.arguments()?;
                    } else if self.eat_punct("[") {
                        self.expression(false)?;
                        self.expect_punct("]")?;
                    } else {
                        self.member_name()?;
                    }
                }
                (TokenKind::Punctuator, "[") => {
                    self.bump();
                    self.expression(false)?;
                    self.expect_punct("]")?;
                }
                (TokenKind::Punctuator, "(") if allow_calls => self.arguments()?,
                (TokenKind::Template, _) => {
                    self.bump();
                }
                _ => return Ok(()),
            }
        }
    }

    fn primary(&mut self) -> PResult<()> {
        let tok = self.cur();
        match (tok.kind, tok.text) {
            (TokenKind::Identifier, "async")
                if self.nth(1).is_keyword("function") && !self.toks[(self.pos + 1).min(self.toks.len() - 1)].newline_before =>
            {
                self.bump();
                self.function(true, false).map(|_| ())
            }
            (TokenKind::Identifier, _)
            | (TokenKind::Number | TokenKind::String | TokenKind::Template | TokenKind::Regex, _) => {
                self.bump();
                Ok(())
            }
            (TokenKind::Keyword, "this" | "null" | "true" | "false" | "super" | "let" | "yield" | "await") => {
                self.bump();
                Ok(())
            }
            (TokenKind::Keyword, "function") => self.function(true, false).map(|_| ()),
            (TokenKind::Keyword, "class") => self.class(false).map(|_| ()),
            (TokenKind::Keyword, "import") => {
                self.bump();
                if self.eat_punct(".") {
                    self.member_name()
                } else if self.at_punct("(") {
                    Ok(())
                } else {
                    self.unexpected()
                }
            }
            (TokenKind::Punctuator, "(") => {
                self.bump();
                self.expression(false)?;
                self.expect_punct(")")
            }
            (TokenKind::Punctuator, "[") => {
                self.bump();
                while !self.eat_punct("]") {
                    if self.eat_punct(",") {
                        continue;
                    }
                    self.eat_punct("...");
                    self.assignment(false)?;
                    if !self.eat_punct(",") {
                        self.expect_punct("]")?;
                        break;
                    }
                }
                Ok(())
            }
            (TokenKind::Punctuator, "{") => self.object_literal(),
            _ => self.unexpected(),
        }
    }

    fn object_literal(&mut self) -> PResult<()> {
        self.bump();
        while !self.eat_punct("}") {
            if self.eat_punct("...") {
                self.assignment(false)?;
            } else {
                let member_start = self.cur();
                loop {
                    let next = self.nth(1);
                    let modifier = self.at_ident("get") || self.at_ident("set") || self.at_ident("async");
                    let next_is_key = !(next.is_punct("(") || next.is_punct(":") || next.is_punct(",") || next.is_punct("}") || next.is_punct("="));
                    if modifier && next_is_key {
                        self.bump();
                    } else if self.at_punct("*") {
                        self.bump();
                    } else {
                        break;
                    }
                }
                let key = self.cur();
                let name = self.property_name()?;
                if self.at_punct("(") {
                    self.function_rest(name, member_start)?;
                } else if self.eat_punct(":") {
                    self.assignment(false)?;
                } else if key.kind == TokenKind::Identifier || key.kind == TokenKind::Keyword {
                    // Shorthand, possibly with a default inside a pattern.
                    if self.eat_punct("=") {
                        self.assignment(false)?;
                    }
                } else {
                    return self.unexpected();
                }
            }
            if !self.eat_punct(",") {
                self.expect_punct("}")?;
                break;
            }
        }
        Ok(())
    }

    fn program(mut self) -> ParseOutcome {
        self.out.statements = self.statement_list(false, true);
        self.out.parse_errors.sort_by_key(|e| e.offset);
        self.out
    }
}

/// Parses a snippet; errors are reported in the outcome, never returned.
pub fn parse(source: &str, source_type: SourceType) -> ParseOutcome {
    Parser::new(source, source_type).program()
}
