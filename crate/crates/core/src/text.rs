//! Line-oriented tokenizer shared by every text format in the crate.
//!
//! All formats are UTF-8, one statement per line, with `#` starting a comment
//! that runs to the end of the line.

use thiserror::Error;

/// A whitespace-delimited token with its 1-based column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Token<'a> {
    pub text: &'a str,
    pub column: usize,
}

/// A non-empty statement line.
#[derive(Debug, Clone)]
pub(crate) struct Line<'a> {
    pub number: usize,
    pub tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    pub fn error(&self, column: usize, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.number,
            column,
            kind,
        }
    }

    /// Error located at the end of the line, used when tokens are missing.
    pub fn error_at_end(&self, kind: ParseErrorKind) -> ParseError {
        let column = self
            .tokens
            .last()
            .map(|t| t.column + t.text.chars().count())
            .unwrap_or(1);
        self.error(column, kind)
    }

    pub fn syntax(&self, column: usize, message: impl Into<String>) -> ParseError {
        self.error(column, ParseErrorKind::Syntax(message.into()))
    }

    /// Checks the token count exactly, reporting the first extra or the end
    /// of line on mismatch.
    pub fn expect_len(&self, len: usize, usage: &str) -> Result<(), ParseError> {
        match self.tokens.len().cmp(&len) {
            std::cmp::Ordering::Equal => Ok(()),
            std::cmp::Ordering::Less => {
                Err(self.error_at_end(ParseErrorKind::Syntax(format!("expected `{usage}`"))))
            }
            std::cmp::Ordering::Greater => Err(self.syntax(
                self.tokens[len].column,
                format!("unexpected token `{}`, expected `{usage}`", self.tokens[len].text),
            )),
        }
    }
}

/// Splits `text` into statement lines, dropping comments and blank lines.
pub(crate) fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(idx, raw)| {
        let body = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let mut tokens = Vec::new();
        let mut start: Option<(usize, usize)> = None;
        for (column, (byte, ch)) in (1..).zip(body.char_indices()) {
            if ch.is_whitespace() {
                if let Some((s, col)) = start.take() {
                    tokens.push(Token {
                        text: &body[s..byte],
                        column: col,
                    });
                }
            } else if start.is_none() {
                start = Some((byte, column));
            }
        }
        if let Some((s, col)) = start {
            tokens.push(Token {
                text: &body[s..],
                column: col,
            });
        }
        (!tokens.is_empty()).then_some(Line {
            number: idx + 1,
            tokens,
        })
    })
}

/// Identifiers may not contain characters that carry meaning in one of the
/// formats or in `--assign` lists.
pub(crate) fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '=' | ',' | '#' | ':'))
}

pub(crate) fn parse_bit(token: &Token<'_>, line: &Line<'_>) -> Result<bool, ParseError> {
    match token.text {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(line.syntax(token.column, format!("expected 0 or 1, found `{other}`"))),
    }
}

/// A located error from one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("`{0}` is used before it is defined")]
    ForwardReference(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("guess variable `{0}` already labels a node")]
    DuplicateGuess(String),
    #[error("variable `{0}` is not declared")]
    UndeclaredVariable(String),
    #[error("variable `{0}` is declared twice")]
    DuplicateVariable(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("missing `output` line")]
    MissingOutput,
    #[error("missing `{0}` line")]
    Missing(&'static str),
    #[error("{0}")]
    Invalid(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn columns_and_comments() {
        let text = "# header\n\n  n1 = not  g1 # trailing\nvar x";
        let parsed: Vec<_> = lines(text).collect();
        assert_eq!(parsed.len(), 2);
        assert_eq!(parsed[0].number, 3);
        let cols: Vec<_> = parsed[0].tokens.iter().map(|t| (t.text, t.column)).collect();
        assert_eq!(cols, vec![("n1", 3), ("=", 6), ("not", 8), ("g1", 13)]);
        assert_eq!(parsed[1].number, 4);
    }

    #[test]
    fn names() {
        assert!(is_valid_name("x_1[3]"));
        assert!(!is_valid_name("a=b"));
        assert!(!is_valid_name(""));
    }
}
