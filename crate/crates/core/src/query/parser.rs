//! Parser for the SELECT / basic-graph-pattern subset of SPARQL.
//!
//! Supported: optional `PREFIX` declarations, `SELECT [DISTINCT] (* | ?v ...)`,
//! an optional `WHERE`, and a single group of triple patterns separated by
//! `.`, with `;` and `,` shorthands. IRIs, prefixed names, quoted literals,
//! integers, `a` and `?`/`$` variables are accepted as terms. Every other
//! SPARQL clause is rejected by name.

use std::collections::HashMap;
use std::fmt;

use super::model::{BasicGraphPattern, Slot, TriplePattern};
use crate::rdf::{LexError, Scanner, Term};

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const XSD_INTEGER: &str = "http://www.w3.org/2001/XMLSchema#integer";
const XSD_DECIMAL: &str = "http://www.w3.org/2001/XMLSchema#decimal";

const UNSUPPORTED: &[&str] = &[
    "OPTIONAL", "FILTER", "UNION", "MINUS", "BIND", "VALUES", "SERVICE", "GRAPH", "LIMIT",
    "OFFSET", "ORDER", "GROUP", "HAVING", "CONSTRUCT", "ASK", "DESCRIBE", "FROM", "EXISTS",
    "NOT", "REDUCED", "BASE",
];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct QueryError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for QueryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Var(String),
    Iri(String),
    PName(String, String),
    Literal(Term),
    Number(String),
    Punct(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => f.write_str(w),
            Tok::Var(v) => write!(f, "?{v}"),
            Tok::Iri(i) => write!(f, "<{i}>"),
            Tok::PName(p, l) => write!(f, "{p}:{l}"),
            Tok::Literal(t) => write!(f, "{t}"),
            Tok::Number(n) => f.write_str(n),
            Tok::Punct(c) => write!(f, "{c}"),
        }
    }
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    prefixes: HashMap<String, String>,
}

fn location(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn error_at(text: &str, offset: usize, message: impl Into<String>) -> QueryError {
    let (line, column) = location(text, offset);
    QueryError {
        line,
        column,
        message: message.into(),
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '-'
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, QueryError> {
    let lex_err = |e: LexError| {
        let msg = match e.token {
            Some(t) => format!("{} (at `{t}`)", e.message),
            None => e.message,
        };
        error_at(text, e.offset, msg)
    };
    let mut sc = Scanner::new(text);
    let mut toks = Vec::new();
    loop {
        sc.skip_whitespace_and_comments();
        let start = sc.pos();
        let Some(c) = sc.peek() else { break };
        let tok = match c {
            '<' => Tok::Iri(sc.read_iri().map_err(lex_err)?),
            '"' => Tok::Literal(sc.read_literal().map_err(lex_err)?),
            '?' | '$' => {
                sc.bump();
                let name: String = sc.rest().chars().take_while(|&c| is_name_char(c)).collect();
                if name.is_empty() {
                    return Err(error_at(text, start, "empty variable name"));
                }
                sc.advance(name.len());
                Tok::Var(name)
            }
            '_' if sc.starts_with("_:") => {
                return Err(error_at(text, start, "blank nodes are not supported in queries"));
            }
            c if c.is_ascii_digit() || ((c == '-' || c == '+') && sc.rest()[1..].starts_with(|d: char| d.is_ascii_digit())) => {
                let mut len = c.len_utf8();
                let rest = sc.rest();
                len += rest[len..].chars().take_while(|c| c.is_ascii_digit() || *c == '.').map(char::len_utf8).sum::<usize>();
                let mut num = &rest[..len];
                // a trailing '.' ends the pattern rather than the number
                while num.ends_with('.') {
                    num = &num[..num.len() - 1];
                }
                sc.advance(num.len());
                Tok::Number(num.to_string())
            }
            c if c.is_alphabetic() || c == ':' => {
                let word: String = sc.rest().chars().take_while(|&c| is_name_char(c)).collect();
                sc.advance(word.len());
                if sc.peek() == Some(':') {
                    sc.bump();
                    let local: String = sc
                        .rest()
                        .chars()
                        .take_while(|&c| is_name_char(c) || c == '.' || c == ':')
                        .collect();
                    let local = local.trim_end_matches('.').to_string();
                    sc.advance(local.len());
                    Tok::PName(word, local)
                } else {
                    Tok::Word(word)
                }
            }
            c => {
                sc.bump();
                Tok::Punct(c)
            }
        };
        toks.push((tok, start));
    }
    Ok(toks)
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.text.len(), |(_, o)| *o)
    }

    fn err(&self, message: impl Into<String>) -> QueryError {
        error_at(self.text, self.offset(), message)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn word_is(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw))
    }

    fn check_unsupported(&self) -> Result<(), QueryError> {
        if let Some(Tok::Word(w)) = self.peek() {
            let upper = w.to_ascii_uppercase();
            if UNSUPPORTED.contains(&upper.as_str()) {
                return Err(self.err(format!("unsupported clause: {upper}")));
            }
        }
        Ok(())
    }

    fn expect_punct(&mut self, c: char, what: &str) -> Result<(), QueryError> {
        match self.peek() {
            Some(Tok::Punct(p)) if *p == c => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                self.check_unsupported()?;
                Err(self.err(format!("expected {what}, found `{t}`")))
            }
            None => Err(self.err(format!("expected {what}, found end of input"))),
        }
    }

    fn prologue(&mut self) -> Result<(), QueryError> {
        while self.word_is("PREFIX") {
            self.pos += 1;
            let prefix = match self.next() {
                Some(Tok::PName(p, l)) if l.is_empty() => p,
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected prefix name like `ex:` after PREFIX"));
                }
            };
            let iri = match self.next() {
                Some(Tok::Iri(i)) => i,
                _ => {
                    self.pos -= 1;
                    return Err(self.err("expected IRI in PREFIX declaration"));
                }
            };
            self.prefixes.insert(prefix, iri);
        }
        Ok(())
    }

    fn term(&mut self, allow_literal: bool) -> Result<Slot, QueryError> {
        self.check_unsupported()?;
        let offset = self.offset();
        let slot = match self.next() {
            Some(Tok::Var(v)) => Slot::Var(v),
            Some(Tok::Iri(i)) => Slot::Ground(Term::Iri(i)),
            Some(Tok::PName(p, l)) => match self.prefixes.get(&p) {
                Some(base) => Slot::Ground(Term::Iri(format!("{base}{l}"))),
                None => return Err(error_at(self.text, offset, format!("undeclared prefix `{p}:`"))),
            },
            Some(Tok::Word(w)) if w == "a" => Slot::Ground(Term::iri(RDF_TYPE)),
            Some(Tok::Literal(t)) if allow_literal => Slot::Ground(t),
            Some(Tok::Number(n)) if allow_literal => {
                let dt = if n.contains('.') { XSD_DECIMAL } else { XSD_INTEGER };
                Slot::Ground(Term::typed_literal(n, dt))
            }
            Some(Tok::Literal(_)) | Some(Tok::Number(_)) => {
                return Err(error_at(self.text, offset, "literal not allowed in this position"))
            }
            Some(t) => return Err(error_at(self.text, offset, format!("expected term, found `{t}`"))),
            None => return Err(error_at(self.text, offset, "expected term, found end of input")),
        };
        Ok(slot)
    }

    fn group(&mut self) -> Result<Vec<TriplePattern>, QueryError> {
        self.expect_punct('{', "`{`")?;
        let mut patterns = Vec::new();
        loop {
            self.check_unsupported()?;
            if matches!(self.peek(), Some(Tok::Punct('}'))) {
                self.pos += 1;
                break;
            }
            if matches!(self.peek(), Some(Tok::Punct('{'))) {
                return Err(self.err("nested groups are not supported"));
            }
            let subject = self.term(false)?;
            loop {
                let predicate = self.term(false)?;
                loop {
                    let object = self.term(true)?;
                    let ordinal = patterns.len();
                    patterns.push(TriplePattern::new(
                        subject.clone(),
                        predicate.clone(),
                        object,
                        ordinal,
                    ));
                    if matches!(self.peek(), Some(Tok::Punct(','))) {
                        self.pos += 1;
                        continue;
                    }
                    break;
                }
                if matches!(self.peek(), Some(Tok::Punct(';'))) {
                    self.pos += 1;
                    // `;` directly before `.` or `}` is allowed
                    if matches!(self.peek(), Some(Tok::Punct('.' | '}'))) {
                        break;
                    }
                    continue;
                }
                break;
            }
            match self.peek() {
                Some(Tok::Punct('.')) => self.pos += 1,
                Some(Tok::Punct('}')) => {}
                _ => {
                    self.check_unsupported()?;
                    return Err(match self.peek() {
                        Some(t) => self.err(format!("expected `.` or `}}`, found `{t}`")),
                        None => self.err("expected `}`, found end of input"),
                    });
                }
            }
        }
        Ok(patterns)
    }

    fn query(&mut self) -> Result<BasicGraphPattern, QueryError> {
        self.prologue()?;
        self.check_unsupported()?;
        if !self.word_is("SELECT") {
            return Err(self.err("expected SELECT"));
        }
        self.pos += 1;
        let distinct = if self.word_is("DISTINCT") {
            self.pos += 1;
            true
        } else {
            false
        };
        let mut projection: Vec<(String, usize)> = Vec::new();
        let mut star = false;
        if matches!(self.peek(), Some(Tok::Punct('*'))) {
            self.pos += 1;
            star = true;
        } else {
            while let Some(Tok::Var(v)) = self.peek() {
                let v = v.clone();
                let at = self.offset();
                self.pos += 1;
                if !projection.iter().any(|(p, _)| *p == v) {
                    projection.push((v, at));
                }
            }
            if projection.is_empty() {
                if matches!(self.peek(), Some(Tok::Punct('('))) {
                    return Err(self.err("unsupported clause: projection expression"));
                }
                return Err(self.err("expected `*` or at least one variable after SELECT"));
            }
        }
        if self.word_is("WHERE") {
            self.pos += 1;
        }
        let group_start = self.offset();
        let patterns = self.group()?;
        if let Some(t) = self.peek() {
            self.check_unsupported()?;
            return Err(self.err(format!("unexpected `{t}` after query body")));
        }
        if patterns.is_empty() {
            return Err(error_at(self.text, group_start, "query has no triple patterns"));
        }

        let mut bgp = BasicGraphPattern::new(patterns);
        bgp.distinct = distinct;
        if !star {
            let vars = bgp.variables();
            for (v, at) in &projection {
                if !vars.contains(v) {
                    return Err(error_at(
                        self.text,
                        *at,
                        format!("projection variable ?{v} does not occur in any pattern"),
                    ));
                }
            }
            bgp.projection = projection.into_iter().map(|(v, _)| v).collect();
        }
        Ok(bgp)
    }
}

/// Parses a query into its basic graph pattern.
pub fn parse_query(text: &str) -> Result<BasicGraphPattern, QueryError> {
    let toks = tokenize(text)?;
    Parser {
        text,
        toks,
        pos: 0,
        prefixes: HashMap::new(),
    }
    .query()
}
