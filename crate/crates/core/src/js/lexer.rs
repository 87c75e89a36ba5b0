//! Lossless, total JavaScript tokenizer.
//!
//! Every byte of the input lands in exactly one token, trivia included, so
//! concatenating token texts gives the source back. Characters that cannot
//! start a token become [`TokenKind::Invalid`] instead of aborting.

use alloc::vec::Vec;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenKind {
    Identifier,
    Keyword,
    Number,
    String,
    Template,
    Punctuator,
    Comment,
    Regex,
    Whitespace,
    Newline,
    Eof,
    /// Unrecognised character, or a string, template, comment or regex that
    /// never terminates.
    Invalid,
}

impl TokenKind {
    pub fn is_trivia(self) -> bool {
        matches!(self, Self::Whitespace | Self::Newline | Self::Comment)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    /// Byte offset of the first character.
    pub start: usize,
    /// 1-based.
    pub line: u32,
    /// 0-based, counted in characters.
    pub column: u32,
}

impl Token<'_> {
    pub fn end(&self) -> usize {
        self.start + self.text.len()
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuator, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }

    /// Number of line breaks inside the token text.
    pub fn newlines(&self) -> u32 {
        count_newlines(self.text)
    }
}

pub const KEYWORDS: &[&str] = &[
    "await", "break", "case", "catch", "class", "const", "continue", "debugger", "default",
    "delete", "do", "else", "export", "extends", "false", "finally", "for", "function", "if",
    "import", "in", "instanceof", "let", "new", "null", "return", "super", "switch", "this",
    "throw", "true", "try", "typeof", "var", "void", "while", "with", "yield",
];

const PUNCTUATORS: &[&str] = &[
    ">>>=", "...", "===", "!==", "**=", "<<=", ">>=", ">>>", "&&=", "||=", "??=", "=>", "==", "!=",
    "<=", ">=", "&&", "||", "??", "?.", "++", "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "**", "<<", ">>", "{", "}", "(", ")", "[", "]", ";", ",", "<", ">", "+", "-", "*", "/", "%",
    "&", "|", "^", "!", "~", "?", ":", "=", ".", "@",
];

/// Keywords after which a `/` starts a regular expression.
const REGEX_AFTER_KEYWORD: &[&str] = &[
    "return", "typeof", "instanceof", "in", "new", "delete", "void", "throw", "case", "do", "else",
    "yield", "await", "extends",
];

fn is_newline(c: char) -> bool {
    matches!(c, '\n' | '\r' | '\u{2028}' | '\u{2029}')
}

fn count_newlines(text: &str) -> u32 {
    let mut n = 0;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if is_newline(c) {
            if c == '\r' && chars.peek() == Some(&'\n') {
                chars.next();
            }
            n += 1;
        }
    }
    n
}

/// Byte offsets where each line starts, using the tokenizer's notion of a
/// line break. Always starts with 0.
pub fn line_starts(text: &str) -> Vec<usize> {
    let mut starts = alloc::vec![0];
    let mut iter = text.char_indices().peekable();
    while let Some((i, c)) = iter.next() {
        if is_newline(c) {
            let mut next = i + c.len_utf8();
            if c == '\r' {
                if let Some(&(j, '\n')) = iter.peek() {
                    iter.next();
                    next = j + 1;
                }
            }
            starts.push(next);
        }
    }
    starts
}

fn is_id_start(c: char) -> bool {
    c == '$' || c == '_' || c.is_alphabetic()
}

fn is_id_continue(c: char) -> bool {
    is_id_start(c) || c.is_alphanumeric() || c == '\u{200c}' || c == '\u{200d}'
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    /// Last non-trivia token, for regex/division disambiguation.
    prev: Option<(TokenKind, &'a str)>,
}

impl<'a> Lexer<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, skip: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(skip)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat_while(&mut self, f: impl Fn(char) -> bool) {
        while self.peek().is_some_and(&f) {
            self.bump();
        }
    }

    fn regex_allowed(&self) -> bool {
        match self.prev {
            None => true,
            Some((TokenKind::Punctuator, p)) => !matches!(p, ")" | "]" | "}" | "++" | "--"),
            Some((TokenKind::Keyword, k)) => REGEX_AFTER_KEYWORD.contains(&k),
            Some(_) => false,
        }
    }

    /// Lexes one token starting at `self.pos`; returns its kind.
    fn next_kind(&mut self) -> TokenKind {
        let start = self.pos;
        let Some(c) = self.bump() else { return TokenKind::Eof };
        match c {
            '\r' => {
                if self.peek() == Some('\n') {
                    self.bump();
                }
                TokenKind::Newline
            }
            c if is_newline(c) => TokenKind::Newline,
            c if c.is_whitespace() || c == '\u{feff}' => {
                self.eat_while(|c| (c.is_whitespace() && !is_newline(c)) || c == '\u{feff}');
                TokenKind::Whitespace
            }
            '#' if start == 0 && self.peek() == Some('!') => {
                self.eat_while(|c| !is_newline(c));
                TokenKind::Comment
            }
            '#' if self.peek().is_some_and(is_id_start) => {
                self.eat_while(is_id_continue);
                TokenKind::Identifier
            }
            '/' if self.peek() == Some('/') => {
                self.eat_while(|c| !is_newline(c));
                TokenKind::Comment
            }
            '/' if self.peek() == Some('*') => {
                self.bump();
                match self.src[self.pos..].find("*/") {
                    Some(off) => {
                        self.pos += off + 2;
                        TokenKind::Comment
                    }
                    None => {
                        self.pos = self.src.len();
                        TokenKind::Invalid
                    }
                }
            }
            '/' if self.regex_allowed() => self.regex(),
            '\'' | '"' => self.string(c),
            '`' => self.template(),
            c if c.is_ascii_digit() => self.number(c),
            '.' if self.peek().is_some_and(|d| d.is_ascii_digit()) => self.number('.'),
            c if is_id_start(c) => {
                self.eat_while(is_id_continue);
                if KEYWORDS.contains(&&self.src[start..self.pos]) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                }
            }
            '\\' if self.peek() == Some('u') => {
                // Identifier written with unicode escapes.
                self.eat_while(|c| is_id_continue(c) || c == '\\' || c == '{' || c == '}');
                TokenKind::Identifier
            }
            _ => {
                self.pos = start;
                let rest = &self.src[start..];
                let punct = PUNCTUATORS.iter().find(|p| {
                    rest.starts_with(**p)
                        && !(**p == "?." && rest[2..].starts_with(|c: char| c.is_ascii_digit()))
                });
                match punct {
                    Some(p) => {
                        self.pos += p.len();
                        TokenKind::Punctuator
                    }
                    None => {
                        self.bump();
                        TokenKind::Invalid
                    }
                }
            }
        }
    }

    fn string(&mut self, quote: char) -> TokenKind {
        while let Some(c) = self.peek() {
            match c {
                '\\' => {
                    self.bump();
                    if self.peek() == Some('\r') {
                        self.bump();
                        if self.peek() == Some('\n') {
                            self.bump();
                        }
                    } else {
                        self.bump();
                    }
                }
                c if c == quote => {
                    self.bump();
                    return TokenKind::String;
                }
                '\n' | '\r' => return TokenKind::Invalid,
                _ => {
                    self.bump();
                }
            }
        }
        TokenKind::Invalid
    }

    fn template(&mut self) -> TokenKind {
        while let Some(c) = self.bump() {
            match c {
                '\\' => {
                    self.bump();
                }
                '`' => return TokenKind::Template,
                '$' if self.peek() == Some('{') => {
                    self.bump();
                    if !self.substitution() {
                        return TokenKind::Invalid;
                    }
                }
                _ => {}
            }
        }
        TokenKind::Invalid
    }

    /// Skips a `${ ... }` body by lexing it; false when it never closes.
    fn substitution(&mut self) -> bool {
        let mut inner = Lexer { src: self.src, pos: self.pos, prev: None };
        let mut depth = 0usize;
        loop {
            let start = inner.pos;
            let kind = inner.next_kind();
            let text = &self.src[start..inner.pos];
            match kind {
                TokenKind::Eof => {
                    self.pos = inner.pos;
                    return false;
                }
                TokenKind::Punctuator if text == "{" => depth += 1,
                TokenKind::Punctuator if text == "}" => {
                    if depth == 0 {
                        self.pos = inner.pos;
                        return true;
                    }
                    depth -= 1;
                }
                _ => {}
            }
            if !kind.is_trivia() {
                inner.prev = Some((kind, text));
            }
        }
    }

    fn regex(&mut self) -> TokenKind {
        let mut in_class = false;
        loop {
            match self.peek() {
                None => return TokenKind::Invalid,
                Some(c) if is_newline(c) => return TokenKind::Invalid,
                Some('\\') => {
                    self.bump();
                    if self.peek().is_some_and(|c| !is_newline(c)) {
                        self.bump();
                    }
                }
                Some('[') => {
                    in_class = true;
                    self.bump();
                }
                Some(']') => {
                    in_class = false;
                    self.bump();
                }
                Some('/') if !in_class => {
                    self.bump();
                    self.eat_while(is_id_continue);
                    return TokenKind::Regex;
                }
                Some(_) => {
                    self.bump();
                }
            }
        }
    }

    fn number(&mut self, first: char) -> TokenKind {
        let digits = |c: char| c.is_ascii_digit() || c == '_';
        if first == '0' && matches!(self.peek(), Some('x' | 'X' | 'o' | 'O' | 'b' | 'B')) {
            self.bump();
            self.eat_while(|c| c.is_ascii_hexdigit() || c == '_');
            if self.peek() == Some('n') {
                self.bump();
            }
            return TokenKind::Number;
        }
        self.eat_while(digits);
        if first != '.' && self.peek() == Some('.') {
            self.bump();
            self.eat_while(digits);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                for _ in 0..digit_at {
                    self.bump();
                }
                self.eat_while(digits);
            }
        }
        if self.peek() == Some('n') {
            self.bump();
        }
        TokenKind::Number
    }
}

/// Tokenizes `source`, trivia included, ending with an empty `Eof` token.
pub fn tokenize(source: &str) -> Vec<Token<'_>> {
    let mut lexer = Lexer { src: source, pos: 0, prev: None };
    let mut tokens = Vec::new();
    let (mut line, mut column) = (1u32, 0u32);
    loop {
        let start = lexer.pos;
        let kind = lexer.next_kind();
        let text = &source[start..lexer.pos];
        tokens.push(Token { kind, text, start, line, column });
        if kind == TokenKind::Eof {
            return tokens;
        }
        if !kind.is_trivia() {
            lexer.prev = Some((kind, text));
        }
        let breaks = count_newlines(text);
        if breaks == 0 {
            column += text.chars().count() as u32;
        } else {
            line += breaks;
            let tail = text.rsplit(is_newline).next().unwrap_or("");
            column = tail.chars().count() as u32;
        }
    }
}

/// Only the tokens the grammar sees: no whitespace, newlines or comments.
pub fn significant_tokens(source: &str) -> Vec<Token<'_>> {
    tokenize(source).into_iter().filter(|t| !t.kind.is_trivia()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;
    use TokenKind::*;

    fn kinds(src: &str) -> Vec<(TokenKind, &str)> {
        significant_tokens(src)
            .into_iter()
            .filter(|t| t.kind != Eof)
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn declaration() {
        assert_eq!(
            kinds("const x = 1;"),
            vec![(Keyword, "const"), (Identifier, "x"), (Punctuator, "="), (Number, "1"), (Punctuator, ";")]
        );
    }

    #[test]
    fn template_is_one_token() {
        assert_eq!(kinds("`a${b}`"), vec![(Template, "`a${b}`")]);
        assert_eq!(kinds("`x${ {a:`y${1}`}.a }z`"), vec![(Template, "`x${ {a:`y${1}`}.a }z`")]);
        assert_eq!(kinds("`open ${"), vec![(Invalid, "`open ${")]);
    }

    #[test]
    fn invalid_characters_do_not_abort() {
        let toks = kinds("\u{0}@@");
        assert_eq!(toks[0], (Invalid, "\u{0}"));
        assert_eq!(toks.len(), 3);
    }

    #[test]
    fn regex_versus_division() {
        assert_eq!(kinds("a / b / c").iter().filter(|t| t.0 == Regex).count(), 0);
        assert_eq!(kinds("x = /ab+c/gi.test(s)")[2], (Regex, "/ab+c/gi"));
        assert_eq!(kinds("return /[/]/")[1], (Regex, "/[/]/"));
        assert_eq!(kinds("(a) / 2")[3], (Punctuator, "/"));
    }

    #[test]
    fn numbers() {
        for n in ["0", "1.5", ".5", "1e10", "2E-3", "0xFF", "0b1010", "0o17", "1_000", "10n"] {
            assert_eq!(kinds(n), vec![(Number, n)], "{n}");
        }
    }

    #[test]
    fn strings_and_unterminated() {
        assert_eq!(kinds(r#"'a\'b' "c""#), vec![(String, r"'a\'b'"), (String, "\"c\"")]);
        assert_eq!(kinds("'open\nx")[0], (Invalid, "'open"));
        assert_eq!(kinds("/* never")[0], (Invalid, "/* never"));
    }

    #[test]
    fn positions() {
        let toks = significant_tokens("a\n  bb\r\n`x\ny` c");
        assert_eq!((toks[1].line, toks[1].column), (2, 2));
        assert_eq!((toks[2].line, toks[2].column), (3, 0));
        assert_eq!((toks[3].line, toks[3].column), (4, 3));
    }

    #[test]
    fn optional_chaining_versus_ternary() {
        assert_eq!(kinds("a?.b")[1], (Punctuator, "?."));
        assert_eq!(kinds("a?.5:1")[1], (Punctuator, "?"));
    }

    #[test]
    fn roundtrip_simple() {
        let src = "#!/usr/bin/env node\nconst a = `t${1}`; // c\r\n/* b */ x /= 2;\u{2028}#p";
        let joined: String = tokenize(src).iter().map(|t| t.text).collect();
        assert_eq!(joined, src);
    }
}
