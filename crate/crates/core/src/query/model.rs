use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rdf::{Term, Triple};

/// One position of a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slot {
    Ground(Term),
    Var(String),
}

impl Slot {
    pub fn var(name: impl Into<String>) -> Self {
        Slot::Var(name.into())
    }

    pub fn iri(iri: impl Into<String>) -> Self {
        Slot::Ground(Term::iri(iri))
    }

    pub fn is_bound(&self) -> bool {
        matches!(self, Slot::Ground(_))
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Slot::Var(v) => Some(v),
            Slot::Ground(_) => None,
        }
    }

    pub fn as_term(&self) -> Option<&Term> {
        match self {
            Slot::Ground(t) => Some(t),
            Slot::Var(_) => None,
        }
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Ground(t) => write!(f, "{t}"),
            Slot::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    Subject,
    Predicate,
    Object,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TriplePattern {
    pub subject: Slot,
    pub predicate: Slot,
    pub object: Slot,
    /// 0-based position of the pattern in its query.
    pub ordinal: usize,
}

impl TriplePattern {
    pub fn new(subject: Slot, predicate: Slot, object: Slot, ordinal: usize) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
            ordinal,
        }
    }

    pub fn slot(&self, position: Position) -> &Slot {
        match position {
            Position::Subject => &self.subject,
            Position::Predicate => &self.predicate,
            Position::Object => &self.object,
        }
    }

    pub fn slots(&self) -> [(Position, &Slot); 3] {
        [
            (Position::Subject, &self.subject),
            (Position::Predicate, &self.predicate),
            (Position::Object, &self.object),
        ]
    }

    /// The bound predicate IRI, if any.
    pub fn predicate_iri(&self) -> Option<&str> {
        self.predicate.as_term().and_then(Term::as_iri)
    }

    /// Distinct variable names in subject, predicate, object order.
    pub fn variables(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::with_capacity(3);
        for (_, slot) in self.slots() {
            if let Some(v) = slot.as_var() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }

    pub fn positions_of(&self, var: &str) -> Vec<Position> {
        self.slots()
            .into_iter()
            .filter(|(_, s)| s.as_var() == Some(var))
            .map(|(p, _)| p)
            .collect()
    }

    /// Position used to classify joins on `var`: predicate wins over subject,
    /// subject over object.
    pub fn join_position(&self, var: &str) -> Option<Position> {
        let positions = self.positions_of(var);
        [Position::Predicate, Position::Subject, Position::Object]
            .into_iter()
            .find(|p| positions.contains(p))
    }

    pub fn has_repeated_variable(&self) -> bool {
        self.variables().len() < self.slots().iter().filter(|(_, s)| !s.is_bound()).count()
    }

    /// Whether the ground triple matches this pattern, including the equality
    /// constraint between repeated variables.
    pub fn unifies(&self, triple: &Triple) -> bool {
        let terms = [&triple.subject, &triple.predicate, &triple.object];
        let slots = [&self.subject, &self.predicate, &self.object];
        for i in 0..3 {
            match slots[i] {
                Slot::Ground(t) if t != terms[i] => return false,
                Slot::Var(v) => {
                    for j in (i + 1)..3 {
                        if slots[j].as_var() == Some(v.as_str()) && terms[i] != terms[j] {
                            return false;
                        }
                    }
                }
                _ => {}
            }
        }
        true
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}

/// A conjunctive query: the triple patterns of a `SELECT ... WHERE { }` block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicGraphPattern {
    pub patterns: Vec<TriplePattern>,
    pub projection: Vec<String>,
    /// Whether the query asked for `DISTINCT`. Real cardinalities are bag
    /// counts regardless; the flag is informational.
    pub distinct: bool,
}

impl BasicGraphPattern {
    /// Builds a BGP projecting every variable, renumbering ordinals 0..n.
    pub fn new(patterns: Vec<TriplePattern>) -> Self {
        let patterns: Vec<TriplePattern> = patterns
            .into_iter()
            .enumerate()
            .map(|(i, mut tp)| {
                tp.ordinal = i;
                tp
            })
            .collect();
        let projection = all_variables(&patterns);
        BasicGraphPattern {
            patterns,
            projection,
            distinct: false,
        }
    }

    pub fn variables(&self) -> Vec<String> {
        all_variables(&self.patterns)
    }

    pub fn join_edges(&self) -> Vec<JoinEdge> {
        join_edges(&self.patterns)
    }

    pub fn pattern(&self, ordinal: usize) -> Option<&TriplePattern> {
        self.patterns.iter().find(|tp| tp.ordinal == ordinal)
    }
}

fn all_variables(patterns: &[TriplePattern]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for tp in patterns {
        for v in tp.variables() {
            if seen.insert(v) {
                out.push(v.to_string());
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum JoinKind {
    SubjectSubject,
    SubjectObject,
    ObjectObject,
    PredicateInvolved,
}

impl JoinKind {
    pub fn short(self) -> &'static str {
        match self {
            JoinKind::SubjectSubject => "SS",
            JoinKind::SubjectObject => "SO",
            JoinKind::ObjectObject => "OO",
            JoinKind::PredicateInvolved => "P",
        }
    }
}

/// A shared variable between two patterns of the same query.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct JoinEdge {
    /// Ordinal of the first pattern; always less than `right`.
    pub left: usize,
    pub right: usize,
    pub variable: String,
    pub kind: JoinKind,
    pub left_position: Position,
    pub right_position: Position,
}

impl JoinEdge {
    pub fn touches(&self, ordinal: usize) -> bool {
        self.left == ordinal || self.right == ordinal
    }

    /// Position of the variable in the pattern with the given ordinal.
    pub fn position_in(&self, ordinal: usize) -> Option<Position> {
        if ordinal == self.left {
            Some(self.left_position)
        } else if ordinal == self.right {
            Some(self.right_position)
        } else {
            None
        }
    }

    /// The endpoint opposite to `ordinal`.
    pub fn other(&self, ordinal: usize) -> Option<usize> {
        if ordinal == self.left {
            Some(self.right)
        } else if ordinal == self.right {
            Some(self.left)
        } else {
            None
        }
    }
}

fn classify(a: Position, b: Position) -> JoinKind {
    use Position::*;
    match (a, b) {
        (Predicate, _) | (_, Predicate) => JoinKind::PredicateInvolved,
        (Subject, Subject) => JoinKind::SubjectSubject,
        (Object, Object) => JoinKind::ObjectObject,
        _ => JoinKind::SubjectObject,
    }
}

/// One edge per unordered pattern pair per shared variable, ordered by
/// `(left, right, variable)`.
pub fn join_edges(patterns: &[TriplePattern]) -> Vec<JoinEdge> {
    let mut sorted: Vec<&TriplePattern> = patterns.iter().collect();
    sorted.sort_by_key(|tp| tp.ordinal);
    let mut edges = Vec::new();
    for (i, a) in sorted.iter().enumerate() {
        let a_vars = a.variables();
        for b in &sorted[i + 1..] {
            let mut shared: Vec<&str> = b
                .variables()
                .into_iter()
                .filter(|v| a_vars.contains(v))
                .collect();
            shared.sort_unstable();
            for v in shared {
                let lp = a.join_position(v).expect("variable occurs in left pattern");
                let rp = b.join_position(v).expect("variable occurs in right pattern");
                edges.push(JoinEdge {
                    left: a.ordinal,
                    right: b.ordinal,
                    variable: v.to_string(),
                    kind: classify(lp, rp),
                    left_position: lp,
                    right_position: rp,
                });
            }
        }
    }
    edges
}
