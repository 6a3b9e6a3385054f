//! Line-oriented N-Triples reader.

use std::fmt;

use super::lexer::{LexError, Scanner};
use super::term::{Term, Triple};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// The line does not follow the N-Triples grammar.
    Syntax,
    /// The line is well-formed text but violates the RDF data model,
    /// e.g. a literal in subject position.
    Structural,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    /// 1-based line number.
    pub line: usize,
    pub message: String,
    pub token: Option<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)?;
        if let Some(token) = &self.token {
            write!(f, " (at `{token}`)")?;
        }
        Ok(())
    }
}

impl ParseError {
    fn syntax(line: usize, message: impl Into<String>, token: Option<String>) -> Self {
        ParseError {
            kind: ParseErrorKind::Syntax,
            line,
            message: message.into(),
            token,
        }
    }

    fn from_lex(line: usize, err: LexError) -> Self {
        ParseError::syntax(line, err.message, err.token)
    }
}

/// Parses a whole N-Triples document. Triples come back in document order and
/// duplicates are kept; deduplication happens when a store is built.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, ParseError> {
    let mut triples = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        if let Some(triple) = parse_line(line, idx + 1)? {
            triples.push(triple);
        }
    }
    Ok(triples)
}

/// Parses one line; blank and comment-only lines yield `Ok(None)`.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>, ParseError> {
    let mut sc = Scanner::new(line.strip_suffix('\r').unwrap_or(line));
    sc.skip_blanks();
    if sc.is_eof() || sc.peek() == Some('#') {
        return Ok(None);
    }

    let subject = match sc.peek() {
        Some('<') => Term::Iri(sc.read_iri().map_err(|e| ParseError::from_lex(line_no, e))?),
        Some('_') if sc.starts_with("_:") => {
            Term::Blank(sc.read_blank().map_err(|e| ParseError::from_lex(line_no, e))?)
        }
        Some('"') => {
            let token = sc.read_literal().ok().map(|t| t.to_string());
            return Err(ParseError {
                kind: ParseErrorKind::Structural,
                line: line_no,
                message: "literal is not allowed in subject position".into(),
                token,
            });
        }
        _ => {
            return Err(ParseError::syntax(
                line_no,
                "expected subject term",
                sc.token_preview(),
            ))
        }
    };

    sc.skip_blanks();
    let predicate = match sc.peek() {
        Some('<') => Term::Iri(sc.read_iri().map_err(|e| ParseError::from_lex(line_no, e))?),
        None => return Err(ParseError::syntax(line_no, "expected predicate IRI", None)),
        Some(_) => {
            return Err(ParseError::syntax(
                line_no,
                "expected predicate IRI",
                sc.token_preview(),
            ))
        }
    };

    sc.skip_blanks();
    let object = match sc.peek() {
        Some('<') => Term::Iri(sc.read_iri().map_err(|e| ParseError::from_lex(line_no, e))?),
        Some('_') if sc.starts_with("_:") => {
            Term::Blank(sc.read_blank().map_err(|e| ParseError::from_lex(line_no, e))?)
        }
        Some('"') => sc.read_literal().map_err(|e| ParseError::from_lex(line_no, e))?,
        None => return Err(ParseError::syntax(line_no, "expected object term", None)),
        Some(_) => {
            return Err(ParseError::syntax(
                line_no,
                "expected object term",
                sc.token_preview(),
            ))
        }
    };

    sc.skip_blanks();
    if sc.peek() != Some('.') {
        return Err(ParseError::syntax(
            line_no,
            "expected '.' at end of statement",
            sc.token_preview(),
        ));
    }
    sc.bump();
    sc.skip_blanks();
    if !sc.is_eof() && sc.peek() != Some('#') {
        return Err(ParseError::syntax(
            line_no,
            "unexpected content after statement",
            sc.token_preview(),
        ));
    }

    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}
