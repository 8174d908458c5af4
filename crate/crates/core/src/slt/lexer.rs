//! Lexer for C-family source text.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LexKind {
    Keyword,
    Identifier,
    Number,
    String,
    Char,
    Operator,
    Delimiter,
}

impl LexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            LexKind::Keyword => "keyword",
            LexKind::Identifier => "identifier",
            LexKind::Number => "number",
            LexKind::String => "string",
            LexKind::Char => "char",
            LexKind::Operator => "operator",
            LexKind::Delimiter => "delimiter",
        }
    }
}

/// One lexeme. Equality, ordering and hashing use `(kind, text)`; `start`
/// is the byte offset in the source.
#[derive(Debug, Clone)]
pub struct LexToken {
    pub kind: LexKind,
    pub text: String,
    pub start: usize,
}

impl LexToken {
    fn identity(&self) -> (LexKind, &str) {
        (self.kind, &self.text)
    }
}

impl PartialEq for LexToken {
    fn eq(&self, other: &Self) -> bool {
        self.identity() == other.identity()
    }
}

impl Eq for LexToken {}

impl Hash for LexToken {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.identity().hash(state);
    }
}

impl PartialOrd for LexToken {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LexToken {
    fn cmp(&self, other: &Self) -> Ordering {
        self.identity().cmp(&other.identity())
    }
}

impl fmt::Display for LexToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.as_str(), self.text)
    }
}

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unterminated literal starting at {0}")]
    UnterminatedString(Position),
    #[error("unterminated comment starting at {0}")]
    UnterminatedComment(Position),
}

static KEYWORD_LIST: &str = include_str!("keywords.txt");

pub fn keywords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        KEYWORD_LIST
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect()
    })
}

const DELIMITERS: &[&str] = &["...", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@"];

/// Longest first.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=",
    "-=", "*=", "/=", "&=", "|=", "^=", "%=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<", ">",
    "!", "~", "?", ":", "&", "|", "^",
];

struct Lexer<'s> {
    src: &'s str,
    pos: usize,
    out: Vec<LexToken>,
}

/// Splits source text into lexemes, dropping whitespace and comments.
/// A leading byte order mark is skipped.
pub fn lex_source(text: &str) -> Result<Vec<LexToken>, LexError> {
    let mut lexer = Lexer {
        src: text,
        pos: if text.starts_with('\u{feff}') {
            '\u{feff}'.len_utf8()
        } else {
            0
        },
        out: Vec::new(),
    };
    lexer.run()?;
    Ok(lexer.out)
}

impl<'s> Lexer<'s> {
    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.rest().chars().nth(n)
    }

    fn position(&self, byte: usize) -> Position {
        let before = &self.src[..byte];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        Position {
            line,
            column: self.src[line_start..byte].chars().count() + 1,
        }
    }

    fn push(&mut self, kind: LexKind, start: usize) {
        self.out.push(LexToken {
            kind,
            text: self.src[start..self.pos].to_string(),
            start,
        });
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn run(&mut self) -> Result<(), LexError> {
        while let Some(c) = self.peek() {
            let start = self.pos;
            if c.is_whitespace() {
                self.bump();
            } else if self.rest().starts_with("//") {
                self.pos = self
                    .rest()
                    .find('\n')
                    .map_or(self.src.len(), |i| self.pos + i);
            } else if self.rest().starts_with("/*") {
                match self.rest()[2..].find("*/") {
                    Some(i) => self.pos += i + 4,
                    None => return Err(LexError::UnterminatedComment(self.position(start))),
                }
            } else if self.rest().starts_with("\"\"\"") {
                match self.text_block_end() {
                    Some(end) => {
                        self.pos = end;
                        self.push(LexKind::String, start);
                    }
                    None => return Err(LexError::UnterminatedString(self.position(start))),
                }
            } else if c == '"' || c == '\'' {
                self.quoted(c)?;
                let kind = if c == '"' {
                    LexKind::String
                } else {
                    LexKind::Char
                };
                self.push(kind, start);
            } else if c.is_ascii_digit()
                || (c == '.' && self.peek_at(1).is_some_and(|d| d.is_ascii_digit()))
            {
                self.number();
                self.push(LexKind::Number, start);
            } else if c.is_alphabetic() || c == '_' || c == '$' {
                while self
                    .peek()
                    .is_some_and(|c| c.is_alphanumeric() || c == '_' || c == '$')
                {
                    self.bump();
                }
                let kind = if keywords().contains(&self.src[start..self.pos]) {
                    LexKind::Keyword
                } else {
                    LexKind::Identifier
                };
                self.push(kind, start);
            } else if let Some(d) = DELIMITERS.iter().find(|d| self.rest().starts_with(**d)) {
                self.pos += d.len();
                self.push(LexKind::Delimiter, start);
            } else if let Some(op) = OPERATORS.iter().find(|o| self.rest().starts_with(**o)) {
                self.pos += op.len();
                self.push(LexKind::Operator, start);
            } else {
                // Anything else stands alone as an operator.
                self.bump();
                self.push(LexKind::Operator, start);
            }
        }
        Ok(())
    }

    /// Byte offset just past the closing quotes of the text block starting
    /// at `pos`. Escaped quotes do not close the block.
    fn text_block_end(&self) -> Option<usize> {
        let body = self.rest();
        let mut from = 3;
        loop {
            let rel = from + body[from..].find("\"\"\"")?;
            let backslashes = body[..rel].chars().rev().take_while(|&c| c == '\\').count();
            if backslashes % 2 == 0 {
                return Some(self.pos + rel + 3);
            }
            from = rel + 1;
        }
    }

    fn quoted(&mut self, quote: char) -> Result<(), LexError> {
        let start = self.pos;
        self.bump();
        loop {
            match self.bump() {
                Some('\\') => {
                    if self.peek().is_none_or(|c| c == '\n') {
                        return Err(LexError::UnterminatedString(self.position(start)));
                    }
                    self.bump();
                }
                Some(c) if c == quote => return Ok(()),
                Some('\n') | None => {
                    return Err(LexError::UnterminatedString(self.position(start)))
                }
                Some(_) => {}
            }
        }
    }

    fn number(&mut self) {
        let hex = self.rest().starts_with("0x") || self.rest().starts_with("0X");
        let mut prev = '\0';
        while let Some(c) = self.peek() {
            let exponent_sign = (c == '+' || c == '-')
                && (matches!(prev, 'p' | 'P') || (!hex && matches!(prev, 'e' | 'E')));
            if c.is_ascii_alphanumeric() || c == '_' || c == '.' || exponent_sign {
                if c == '.' && self.peek_at(1) == Some('.') {
                    break;
                }
                prev = c;
                self.bump();
            } else {
                break;
            }
        }
    }
}

/// Replaces every identifier's text with one shared placeholder.
pub fn abstract_identifiers(tokens: &mut [LexToken]) {
    for t in tokens.iter_mut().filter(|t| t.kind == LexKind::Identifier) {
        t.text = "<id>".to_string();
    }
}
