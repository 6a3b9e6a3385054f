use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::query::{BasicGraphPattern, TriplePattern};
use crate::rdf::TripleStore;

/// Names of the sources relevant to a pattern.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSet {
    pub members: BTreeSet<String>,
}

impl SourceSet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SourceSet {
            members: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.members.contains(name)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.members.iter().map(String::as_str)
    }

    pub fn union(&self, other: &SourceSet) -> SourceSet {
        SourceSet {
            members: self.members.union(&other.members).cloned().collect(),
        }
    }
}

/// Exact source selection: a source is relevant iff it holds at least one
/// triple matching the pattern.
pub fn select_sources(tp: &TriplePattern, stores: &[TripleStore]) -> SourceSet {
    SourceSet {
        members: stores
            .iter()
            .filter(|s| s.contains_match(tp))
            .map(|s| s.name().to_string())
            .collect(),
    }
}

/// Relevant sources for every pattern of a query, by ordinal.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceSelection {
    by_ordinal: BTreeMap<usize, SourceSet>,
}

impl SourceSelection {
    pub fn compute(bgp: &BasicGraphPattern, stores: &[TripleStore]) -> Self {
        SourceSelection {
            by_ordinal: bgp
                .patterns
                .iter()
                .map(|tp| (tp.ordinal, select_sources(tp, stores)))
                .collect(),
        }
    }

    /// Every pattern gets the same set; used when selection is not the
    /// subject of a test.
    pub fn uniform(bgp: &BasicGraphPattern, sources: &SourceSet) -> Self {
        SourceSelection {
            by_ordinal: bgp
                .patterns
                .iter()
                .map(|tp| (tp.ordinal, sources.clone()))
                .collect(),
        }
    }

    pub fn insert(&mut self, ordinal: usize, set: SourceSet) {
        self.by_ordinal.insert(ordinal, set);
    }

    /// Sources for the pattern; empty when the ordinal is unknown.
    pub fn get(&self, ordinal: usize) -> &SourceSet {
        static EMPTY: SourceSet = SourceSet {
            members: BTreeSet::new(),
        };
        self.by_ordinal.get(&ordinal).unwrap_or(&EMPTY)
    }

    /// `#T`: the sum of per-pattern source counts.
    pub fn total(&self) -> usize {
        self.by_ordinal.values().map(SourceSet::len).sum()
    }
}
