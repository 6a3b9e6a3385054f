//! Characteristic sets and characteristic pairs, computed per source.
//!
//! Only subject-rooted sets are built: an entity is any term that appears in
//! subject position of the source.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::rdf::{Term, TripleStore};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicSet {
    pub predicates: BTreeSet<String>,
    /// Number of entities whose predicate set is exactly `predicates`.
    pub count: u64,
    /// Triples per predicate emitted by those entities.
    pub occurrences: BTreeMap<String, u64>,
}

impl CharacteristicSet {
    pub fn occurrences_of(&self, predicate: &str) -> u64 {
        self.occurrences.get(predicate).copied().unwrap_or(0)
    }

    pub fn contains_all<'a>(&self, predicates: impl IntoIterator<Item = &'a str>) -> bool {
        predicates.into_iter().all(|p| self.predicates.contains(p))
    }
}

/// Links from entities of set `from` to entities of set `to` through
/// `predicate`. Indices refer to [`CharSetStats::sets`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharacteristicPair {
    pub from: usize,
    pub to: usize,
    pub predicate: String,
    pub count: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSetStats {
    pub sets: Vec<CharacteristicSet>,
    pub pairs: Vec<CharacteristicPair>,
}

impl CharSetStats {
    pub fn from_store(store: &TripleStore) -> Self {
        let mut by_set: BTreeMap<BTreeSet<String>, (u64, BTreeMap<String, u64>)> = BTreeMap::new();
        let mut entity_set: HashMap<&Term, BTreeSet<String>> = HashMap::new();

        for subject in store.subjects() {
            let mut occ: BTreeMap<String, u64> = BTreeMap::new();
            for t in store.triples_with_subject(subject) {
                let p = t.predicate.as_iri().expect("predicates are IRIs");
                *occ.entry(p.to_string()).or_default() += 1;
            }
            let key: BTreeSet<String> = occ.keys().cloned().collect();
            let entry = by_set.entry(key.clone()).or_default();
            entry.0 += 1;
            for (p, n) in occ {
                *entry.1.entry(p).or_default() += n;
            }
            entity_set.insert(subject, key);
        }

        let index: BTreeMap<&BTreeSet<String>, usize> =
            by_set.keys().enumerate().map(|(i, k)| (k, i)).collect();
        let mut pair_counts: BTreeMap<(usize, usize, String), u64> = BTreeMap::new();
        for t in store.triples() {
            if let Some(target) = entity_set.get(&t.object) {
                let from = index[&entity_set[&t.subject]];
                let to = index[target];
                let p = t.predicate.as_iri().expect("predicates are IRIs").to_string();
                *pair_counts.entry((from, to, p)).or_default() += 1;
            }
        }

        CharSetStats {
            sets: by_set
                .into_iter()
                .map(|(predicates, (count, occurrences))| CharacteristicSet {
                    predicates,
                    count,
                    occurrences,
                })
                .collect(),
            pairs: pair_counts
                .into_iter()
                .map(|((from, to, predicate), count)| CharacteristicPair {
                    from,
                    to,
                    predicate,
                    count,
                })
                .collect(),
        }
    }

    /// Sets whose predicates include every predicate in `required`.
    pub fn supersets<'s, 'a>(
        &'s self,
        required: &'a [&'a str],
    ) -> impl Iterator<Item = (usize, &'s CharacteristicSet)> + 'a
    where
        's: 'a,
    {
        self.sets
            .iter()
            .enumerate()
            .filter(move |(_, cs)| cs.contains_all(required.iter().copied()))
    }

    pub fn find(&self, predicates: &[&str]) -> Option<&CharacteristicSet> {
        self.sets.iter().find(|cs| {
            cs.predicates.len() == predicates.len() && cs.contains_all(predicates.iter().copied())
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSetSummary {
    pub sources: BTreeMap<String, CharSetStats>,
}

impl CharSetSummary {
    pub fn source(&self, name: &str) -> Option<&CharSetStats> {
        self.sources.get(name)
    }
}

pub fn build_charsets(stores: &[TripleStore]) -> CharSetSummary {
    let stats = crate::par::map(stores, CharSetStats::from_store);
    CharSetSummary {
        sources: stores
            .iter()
            .map(|s| s.name().to_string())
            .zip(stats)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rdf::Triple;

    const P: &str = "http://x/p";
    const Q: &str = "http://x/q";

    #[test]
    fn toy1_sets_without_pairs() {
        let s = CharSetStats::from_store(&fixtures::toy1());
        assert_eq!(s.sets.len(), 3);
        let only_p = s.find(&[P]).unwrap();
        assert_eq!((only_p.count, only_p.occurrences_of(P)), (1, 2));
        let pq = s.find(&[P, Q]).unwrap();
        assert_eq!((pq.count, pq.occurrences_of(P), pq.occurrences_of(Q)), (1, 1, 1));
        let only_q = s.find(&[Q]).unwrap();
        assert_eq!((only_q.count, only_q.occurrences_of(Q)), (1, 1));
        assert!(s.pairs.is_empty());
    }

    #[test]
    fn toy2_links_through_o3() {
        let s = CharSetStats::from_store(&fixtures::toy2());
        // s1 and o3 now share the set {p}
        let only_p = s.find(&[P]).unwrap();
        assert_eq!((only_p.count, only_p.occurrences_of(P)), (2, 3));
        let idx = |preds: &[&str]| {
            s.sets
                .iter()
                .position(|cs| cs == s.find(preds).unwrap())
                .unwrap()
        };
        let mut pairs: Vec<_> = s
            .pairs
            .iter()
            .map(|cp| (cp.from, cp.to, cp.predicate.as_str(), cp.count))
            .collect();
        pairs.sort();
        let mut expected = vec![(idx(&[P, Q]), idx(&[P]), Q, 1), (idx(&[Q]), idx(&[P]), Q, 1)];
        expected.sort();
        assert_eq!(pairs, expected);
    }

    #[test]
    fn single_triple() {
        let t = Triple::new(Term::iri("http://x/s"), Term::iri(P), Term::iri("http://x/o")).unwrap();
        let s = CharSetStats::from_store(&TripleStore::new("S", vec![t]));
        assert_eq!(s.sets.len(), 1);
        assert_eq!((s.sets[0].count, s.sets[0].occurrences_of(P)), (1, 1));
    }
}
