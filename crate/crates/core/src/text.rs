//! Line-oriented helpers shared by the text formats.
//!
//! Every format in the crate is UTF-8, one directive per line, with `#`
//! starting a comment. Line and column numbers are 1-based and count
//! characters, not bytes.

use crate::error::{Error, Result};

/// A non-empty, comment-stripped source line.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Line<'a> {
    pub number: usize,
    /// Column of the first character of `text` in the original line.
    pub column: usize,
    pub text: &'a str,
}

impl<'a> Line<'a> {
    /// Splits on whitespace, keeping the column of every word.
    pub fn words(&self) -> Vec<(usize, &'a str)> {
        let mut out = Vec::new();
        let mut start = None;
        for (offset, (byte, ch)) in self.text.char_indices().enumerate() {
            if ch.is_whitespace() {
                if let Some((col, b)) = start.take() {
                    out.push((col, &self.text[b..byte]));
                }
            } else if start.is_none() {
                start = Some((self.column + offset, byte));
            }
        }
        if let Some((col, b)) = start {
            out.push((col, &self.text[b..]));
        }
        out
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::syntax(self.number, self.column, message)
    }

    pub fn error_at(&self, column: usize, message: impl Into<String>) -> Error {
        Error::syntax(self.number, column, message)
    }
}

/// Splits `source` into trimmed, comment-free, non-empty lines.
///
/// When `split_semicolons` is set, `;` also separates directives, which
/// lets short inputs be written on a single line.
pub(crate) fn lines(source: &str, split_semicolons: bool) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (index, raw) in source.lines().enumerate() {
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut pieces: Vec<(usize, &str)> = Vec::new();
        if split_semicolons {
            let mut start = 0;
            for (byte, ch) in content.char_indices() {
                if ch == ';' {
                    pieces.push((start, &content[start..byte]));
                    start = byte + 1;
                }
            }
            pieces.push((start, &content[start..]));
        } else {
            pieces.push((0, content));
        }
        for (byte_start, piece) in pieces {
            let trimmed = piece.trim_start();
            let lead = piece.len() - trimmed.len();
            let text = trimmed.trim_end();
            if text.is_empty() {
                continue;
            }
            let column = content[..byte_start + lead].chars().count() + 1;
            out.push(Line {
                number: index + 1,
                column,
                text,
            });
        }
    }
    out
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub(crate) fn parse_usize(line: &Line<'_>, column: usize, word: &str) -> Result<usize> {
    word.parse::<usize>()
        .map_err(|_| line.error_at(column, format!("expected a non-negative integer, found `{word}`")))
}

/// End of input reached while a block was still open.
pub(crate) fn unexpected_eof(source: &str, what: &str) -> Error {
    let line = source.lines().count().max(1);
    Error::syntax(line, 1, format!("unexpected end of input: missing `end` for {what}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Ident(String),
    Punct(char),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub column: usize,
}

impl Token {
    pub fn is(&self, c: char) -> bool {
        self.kind == TokenKind::Punct(c)
    }
}

/// Splits a line into identifiers and the punctuation `( ) , = & ∧`.
pub(crate) fn tokenize(line: &Line<'_>) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = line.text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = line.column + i;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if !is_identifier(&word) {
                return Err(line.error_at(column, format!("`{word}` is not an identifier")));
            }
            out.push(Token {
                kind: TokenKind::Ident(word),
                column,
            });
        } else if matches!(c, '(' | ')' | ',' | '=' | '&' | '∧') {
            let c = if c == '∧' { '&' } else { c };
            out.push(Token {
                kind: TokenKind::Punct(c),
                column,
            });
            i += 1;
        } else {
            return Err(line.error_at(column, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}
