use std::collections::{BTreeMap, HashMap, HashSet};

use super::term::{Term, Triple};
use crate::query::{Slot, TriplePattern};

/// Per-predicate counts kept alongside the indexes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PredicateCounts {
    pub triples: u64,
    pub distinct_subjects: u64,
    pub distinct_objects: u64,
}

/// Immutable, deduplicated triples of one named source with subject,
/// predicate and object indexes.
#[derive(Debug, Clone)]
pub struct TripleStore {
    name: String,
    triples: Vec<Triple>,
    by_subject: HashMap<Term, Vec<usize>>,
    by_predicate: HashMap<Term, Vec<usize>>,
    by_object: HashMap<Term, Vec<usize>>,
    predicates: BTreeMap<String, PredicateCounts>,
}

impl TripleStore {
    /// Builds a store, dropping duplicate triples. Triples are kept in sorted
    /// order so that two stores built from the same set are identical.
    pub fn new(name: impl Into<String>, triples: impl IntoIterator<Item = Triple>) -> Self {
        let mut triples: Vec<Triple> = triples.into_iter().collect();
        triples.sort();
        triples.dedup();

        let mut by_subject: HashMap<Term, Vec<usize>> = HashMap::new();
        let mut by_predicate: HashMap<Term, Vec<usize>> = HashMap::new();
        let mut by_object: HashMap<Term, Vec<usize>> = HashMap::new();
        for (i, t) in triples.iter().enumerate() {
            by_subject.entry(t.subject.clone()).or_default().push(i);
            by_predicate.entry(t.predicate.clone()).or_default().push(i);
            by_object.entry(t.object.clone()).or_default().push(i);
        }

        let mut predicates = BTreeMap::new();
        for (p, idxs) in &by_predicate {
            let iri = p.as_iri().expect("predicates are IRIs").to_string();
            let subjects: HashSet<&Term> = idxs.iter().map(|&i| &triples[i].subject).collect();
            let objects: HashSet<&Term> = idxs.iter().map(|&i| &triples[i].object).collect();
            predicates.insert(
                iri,
                PredicateCounts {
                    triples: idxs.len() as u64,
                    distinct_subjects: subjects.len() as u64,
                    distinct_objects: objects.len() as u64,
                },
            );
        }

        TripleStore {
            name: name.into(),
            triples,
            by_subject,
            by_predicate,
            by_object,
            predicates,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn distinct_subjects(&self) -> usize {
        self.by_subject.len()
    }

    pub fn distinct_objects(&self) -> usize {
        self.by_object.len()
    }

    /// Counts per predicate IRI, in IRI order.
    pub fn predicates(&self) -> &BTreeMap<String, PredicateCounts> {
        &self.predicates
    }

    pub fn predicate_counts(&self, iri: &str) -> Option<PredicateCounts> {
        self.predicates.get(iri).copied()
    }

    pub fn is_subject(&self, term: &Term) -> bool {
        self.by_subject.contains_key(term)
    }

    /// Triples with the given subject, in store order.
    pub fn triples_with_subject<'a>(&'a self, subject: &Term) -> impl Iterator<Item = &'a Triple> + 'a {
        self.by_subject
            .get(subject)
            .into_iter()
            .flatten()
            .map(move |&i| &self.triples[i])
    }

    /// Iterates the distinct subjects (in no particular order).
    pub fn subjects(&self) -> impl Iterator<Item = &Term> {
        self.by_subject.keys()
    }

    /// Triples whose positions equal the given terms; `None` matches anything.
    pub fn scan<'a>(
        &'a self,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
    ) -> Vec<&'a Triple> {
        let lookups = [
            subject.map(|t| self.by_subject.get(t)),
            predicate.map(|t| self.by_predicate.get(t)),
            object.map(|t| self.by_object.get(t)),
        ];
        // a bound slot absent from its index matches nothing
        if lookups.iter().any(|l| matches!(l, Some(None))) {
            return Vec::new();
        }
        let smallest = lookups
            .iter()
            .flatten()
            .flatten()
            .min_by_key(|idxs| idxs.len());

        let keep = |t: &Triple| {
            subject.is_none_or(|s| &t.subject == s)
                && predicate.is_none_or(|p| &t.predicate == p)
                && object.is_none_or(|o| &t.object == o)
        };
        match smallest {
            Some(idxs) => idxs
                .iter()
                .map(|&i| &self.triples[i])
                .filter(|t| keep(t))
                .collect(),
            None => self.triples.iter().collect(),
        }
    }

    /// Triples unifying with the pattern, honouring repeated variables such as
    /// `?x <p> ?x`. The length of the result is the pattern's cardinality in
    /// this source.
    pub fn matching<'a>(&'a self, pattern: &TriplePattern) -> Vec<&'a Triple> {
        fn ground(slot: &Slot) -> Option<&Term> {
            slot.as_term()
        }
        let mut hits = self.scan(
            ground(&pattern.subject),
            ground(&pattern.predicate),
            ground(&pattern.object),
        );
        if pattern.has_repeated_variable() {
            hits.retain(|t| pattern.unifies(t));
        }
        hits
    }

    pub fn count_matching(&self, pattern: &TriplePattern) -> usize {
        self.matching(pattern).len()
    }

    /// True when at least one triple unifies with the pattern.
    pub fn contains_match(&self, pattern: &TriplePattern) -> bool {
        !self.matching(pattern).is_empty()
    }
}
