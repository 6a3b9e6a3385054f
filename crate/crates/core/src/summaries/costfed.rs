use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::rdf::TripleStore;

/// Per-predicate statistics of one source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostFedPredicate {
    pub triples: u64,
    /// Mean fraction of the predicate's triples sharing one subject,
    /// `1 / distinct_subjects`.
    pub avg_subject_selectivity: f64,
    /// `1 / distinct_objects`.
    pub avg_object_selectivity: f64,
    pub distinct_subjects: u64,
    pub distinct_objects: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostFedStats {
    pub total_triples: u64,
    pub total_subjects: u64,
    pub total_objects: u64,
    pub predicates: BTreeMap<String, CostFedPredicate>,
}

impl CostFedStats {
    pub fn from_store(store: &TripleStore) -> Self {
        let ratio = |n: u64| if n == 0 { 0.0 } else { 1.0 / n as f64 };
        CostFedStats {
            total_triples: store.len() as u64,
            total_subjects: store.distinct_subjects() as u64,
            total_objects: store.distinct_objects() as u64,
            predicates: store
                .predicates()
                .iter()
                .map(|(p, c)| {
                    (
                        p.clone(),
                        CostFedPredicate {
                            triples: c.triples,
                            avg_subject_selectivity: ratio(c.distinct_subjects),
                            avg_object_selectivity: ratio(c.distinct_objects),
                            distinct_subjects: c.distinct_subjects,
                            distinct_objects: c.distinct_objects,
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn predicate(&self, predicate: &str) -> Option<&CostFedPredicate> {
        self.predicates.get(predicate)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostFedSummary {
    pub sources: BTreeMap<String, CostFedStats>,
}

impl CostFedSummary {
    pub fn source(&self, name: &str) -> Option<&CostFedStats> {
        self.sources.get(name)
    }
}

pub fn build_costfed(stores: &[TripleStore]) -> CostFedSummary {
    let stats = crate::par::map(stores, CostFedStats::from_store);
    CostFedSummary {
        sources: stores
            .iter()
            .map(|s| s.name().to_string())
            .zip(stats)
            .collect(),
    }
}
