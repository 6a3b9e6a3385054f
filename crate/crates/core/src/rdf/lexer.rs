//! Character-level scanning of IRIs, blank nodes and literals, shared by the
//! N-Triples reader and the query parser.

use super::term::{Literal, Term};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct LexError {
    pub message: String,
    pub token: Option<String>,
    /// Byte offset where the problem was detected.
    pub offset: usize,
}

impl LexError {
    fn new(message: impl Into<String>, token: Option<String>, offset: usize) -> Self {
        LexError {
            message: message.into(),
            token,
            offset,
        }
    }
}

pub(crate) struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    pub fn new(text: &'a str) -> Self {
        Scanner { text, pos: 0 }
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn starts_with(&self, s: &str) -> bool {
        self.rest().starts_with(s)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn advance(&mut self, bytes: usize) {
        self.pos += bytes;
    }

    pub fn is_eof(&self) -> bool {
        self.pos >= self.text.len()
    }

    /// Skips spaces and tabs. Newlines are significant to N-Triples, so callers
    /// that allow them use [`Scanner::skip_whitespace_and_comments`].
    pub fn skip_blanks(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    pub fn skip_whitespace_and_comments(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('#') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    /// The next whitespace-delimited chunk, used to quote offending tokens.
    pub fn token_preview(&self) -> Option<String> {
        let tok: String = self
            .rest()
            .chars()
            .take_while(|c| !c.is_whitespace())
            .take(40)
            .collect();
        (!tok.is_empty()).then_some(tok)
    }

    fn read_uchar(&mut self, digits: usize, start: usize) -> Result<char, LexError> {
        let rest = self.rest();
        let hex: String = rest.chars().take(digits).collect();
        if hex.len() != digits || !hex.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(LexError::new(
                "invalid unicode escape",
                Some(self.text[start..self.pos].to_string() + &hex),
                start,
            ));
        }
        self.pos += digits;
        let code = u32::from_str_radix(&hex, 16).expect("validated hex digits");
        char::from_u32(code).ok_or_else(|| {
            LexError::new("escape is not a unicode scalar value", Some(hex), start)
        })
    }

    /// Reads `<...>` and returns the IRI without brackets.
    pub fn read_iri(&mut self) -> Result<String, LexError> {
        let start = self.pos;
        debug_assert_eq!(self.peek(), Some('<'));
        self.bump();
        let mut iri = String::new();
        loop {
            match self.bump() {
                None => {
                    return Err(LexError::new(
                        "unterminated IRI",
                        Some(self.text[start..].to_string()),
                        start,
                    ))
                }
                Some('>') => break,
                Some('\\') => {
                    let esc_start = self.pos - 1;
                    match self.bump() {
                        Some('u') => iri.push(self.read_uchar(4, esc_start)?),
                        Some('U') => iri.push(self.read_uchar(8, esc_start)?),
                        _ => {
                            return Err(LexError::new(
                                "invalid escape in IRI",
                                Some(self.text[esc_start..self.pos].to_string()),
                                esc_start,
                            ))
                        }
                    }
                }
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(LexError::new(
                        format!("illegal character {c:?} in IRI"),
                        Some(self.text[start..self.pos].to_string()),
                        start,
                    ))
                }
                Some(c) => iri.push(c),
            }
        }
        if iri.is_empty() {
            return Err(LexError::new("empty IRI", Some("<>".into()), start));
        }
        Ok(iri)
    }

    /// Reads `_:label` and returns the label.
    pub fn read_blank(&mut self) -> Result<String, LexError> {
        let start = self.pos;
        debug_assert!(self.starts_with("_:"));
        self.advance(2);
        let label_start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                self.bump();
            } else {
                break;
            }
        }
        // a label may not end with '.'; that dot terminates the statement
        while self.pos > label_start && self.text[..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        if self.pos == label_start {
            return Err(LexError::new("empty blank node label", Some("_:".into()), start));
        }
        Ok(self.text[label_start..self.pos].to_string())
    }

    /// Reads a quoted literal with optional `@lang` or `^^<datatype>` suffix.
    pub fn read_literal(&mut self) -> Result<Term, LexError> {
        let start = self.pos;
        debug_assert_eq!(self.peek(), Some('"'));
        self.bump();
        let mut lexical = String::new();
        loop {
            match self.bump() {
                None | Some('\n') | Some('\r') => {
                    return Err(LexError::new(
                        "unterminated string literal",
                        Some(self.text[start..self.pos].trim_end().to_string()),
                        start,
                    ))
                }
                Some('"') => break,
                Some('\\') => {
                    let esc_start = self.pos - 1;
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.read_uchar(4, esc_start)?,
                        Some('U') => self.read_uchar(8, esc_start)?,
                        _ => {
                            return Err(LexError::new(
                                "invalid escape in literal",
                                Some(self.text[esc_start..self.pos].to_string()),
                                esc_start,
                            ))
                        }
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        let mut literal = Literal {
            lexical,
            datatype: None,
            language: None,
        };
        if self.starts_with("^^") {
            self.advance(2);
            if self.peek() != Some('<') {
                return Err(LexError::new(
                    "expected datatype IRI after ^^",
                    self.token_preview(),
                    self.pos,
                ));
            }
            literal.datatype = Some(self.read_iri()?);
        } else if self.peek() == Some('@') {
            self.bump();
            let tag_start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    self.bump();
                } else {
                    break;
                }
            }
            let tag = &self.text[tag_start..self.pos];
            let valid = !tag.is_empty()
                && tag.split('-').all(|part| !part.is_empty())
                && tag.split('-').next().is_some_and(|p| p.chars().all(|c| c.is_ascii_alphabetic()));
            if !valid {
                return Err(LexError::new(
                    "invalid language tag",
                    Some(format!("@{tag}")),
                    tag_start,
                ));
            }
            literal.language = Some(tag.to_string());
        }
        Ok(Term::Literal(literal))
    }
}
