use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rdf::TripleStore;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredicateVoid {
    pub triples: u64,
    pub distinct_subjects: u64,
    pub distinct_objects: u64,
}

/// VoID-style counts for one source.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoidStats {
    pub triples: u64,
    pub distinct_subjects: u64,
    pub distinct_objects: u64,
    pub predicates: BTreeMap<String, PredicateVoid>,
}

impl VoidStats {
    pub fn from_store(store: &TripleStore) -> Self {
        VoidStats {
            triples: store.len() as u64,
            distinct_subjects: store.distinct_subjects() as u64,
            distinct_objects: store.distinct_objects() as u64,
            predicates: store
                .predicates()
                .iter()
                .map(|(p, c)| {
                    (
                        p.clone(),
                        PredicateVoid {
                            triples: c.triples,
                            distinct_subjects: c.distinct_subjects,
                            distinct_objects: c.distinct_objects,
                        },
                    )
                })
                .collect(),
        }
    }

    /// Counts for `predicate`, zero when the source never uses it.
    pub fn predicate(&self, predicate: &str) -> PredicateVoid {
        self.predicates.get(predicate).copied().unwrap_or_default()
    }

    pub fn distinct_predicates(&self) -> u64 {
        self.predicates.len() as u64
    }
}

/// VoID statistics per source name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VoidSummary {
    pub sources: BTreeMap<String, VoidStats>,
}

impl VoidSummary {
    pub fn source(&self, name: &str) -> Option<&VoidStats> {
        self.sources.get(name)
    }
}

pub fn build_void(stores: &[TripleStore]) -> VoidSummary {
    let stats = crate::par::map(stores, VoidStats::from_store);
    VoidSummary {
        sources: stores
            .iter()
            .map(|s| s.name().to_string())
            .zip(stats)
            .collect(),
    }
}
