//! Random federations and an independent nested-loop evaluator.

#![allow(dead_code)]

use std::collections::HashMap;

use fedcard::query::{BasicGraphPattern, Slot, TriplePattern};
use fedcard::rdf::{Term, Triple, TripleStore};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const NS: &str = "http://r/";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entity(i: usize) -> Term {
    Term::iri(format!("{NS}e{i}"))
}

fn predicate(i: usize) -> Term {
    Term::iri(format!("{NS}p{i}"))
}

/// A store of at most `max_triples` triples over at most `max_predicates`
/// predicates, drawn from small pools so that joins hit.
pub fn random_store(rng: &mut ChaCha8Rng, name: &str, max_triples: usize, max_predicates: usize) -> TripleStore {
    let n = rng.gen_range(1..=max_triples);
    let predicates = rng.gen_range(1..=max_predicates);
    let entities = rng.gen_range(3..=25);
    let triples = (0..n).map(|_| {
        let s = entity(rng.gen_range(0..entities));
        let p = predicate(rng.gen_range(0..predicates));
        let o = if rng.gen_bool(0.2) {
            Term::plain_literal(format!("v{}", rng.gen_range(0..5)))
        } else {
            entity(rng.gen_range(0..entities))
        };
        Triple::new(s, p, o).expect("valid triple")
    });
    TripleStore::new(name, triples.collect::<Vec<_>>())
}

/// One to three stores sharing the term pools.
pub fn random_federation(rng: &mut ChaCha8Rng) -> Vec<TripleStore> {
    let k = rng.gen_range(1..=3);
    (0..k)
        .map(|i| random_store(rng, &format!("S{i}"), 200, 6))
        .collect()
}

fn random_slot(rng: &mut ChaCha8Rng, vars: &[&str], bind_prob: f64, pool: &[Term]) -> Slot {
    if rng.gen_bool(bind_prob) {
        Slot::Ground(pool.choose(rng).expect("non-empty pool").clone())
    } else {
        Slot::var(*vars.choose(rng).expect("non-empty vars"))
    }
}

/// A BGP of one to `max_patterns` patterns whose constants are taken from
/// the federation.
pub fn random_bgp(rng: &mut ChaCha8Rng, stores: &[TripleStore], max_patterns: usize) -> BasicGraphPattern {
    let all: Vec<&Triple> = stores.iter().flat_map(|s| s.triples()).collect();
    let subjects: Vec<Term> = all.iter().map(|t| t.subject.clone()).collect();
    let mut predicates: Vec<Term> = all.iter().map(|t| t.predicate.clone()).collect();
    predicates.push(predicate(99));
    let objects: Vec<Term> = all.iter().map(|t| t.object.clone()).collect();
    let vars = ["a", "b", "c", "d"];
    let n = rng.gen_range(1..=max_patterns);
    let patterns = (0..n)
        .map(|i| {
            let s = random_slot(rng, &vars, 0.15, &subjects);
            let p = if rng.gen_bool(0.85) {
                Slot::Ground(predicates.choose(rng).expect("predicates").clone())
            } else {
                Slot::var(*vars.choose(rng).expect("vars"))
            };
            let o = random_slot(rng, &vars, 0.2, &objects);
            TriplePattern::new(s, p, o, i)
        })
        .collect();
    BasicGraphPattern::new(patterns)
}

/// Matches by scanning every triple; the pattern's variables are bound in
/// `binding` as they are met.
fn extend<'a>(tp: &TriplePattern, triple: &'a Triple, binding: &HashMap<String, &'a Term>) -> Option<HashMap<String, &'a Term>> {
    let mut out = binding.clone();
    for (slot, term) in [
        (&tp.subject, &triple.subject),
        (&tp.predicate, &triple.predicate),
        (&tp.object, &triple.object),
    ] {
        match slot {
            Slot::Ground(g) => {
                if g != term {
                    return None;
                }
            }
            Slot::Var(v) => match out.get(v) {
                Some(bound) if *bound != term => return None,
                Some(_) => {}
                None => {
                    out.insert(v.clone(), term);
                }
            },
        }
    }
    Some(out)
}

fn count_from<'a>(patterns: &[&TriplePattern], triples: &[&'a Triple], binding: &HashMap<String, &'a Term>) -> u64 {
    let Some((first, rest)) = patterns.split_first() else {
        return 1;
    };
    triples
        .iter()
        .filter_map(|t| extend(first, t, binding))
        .map(|b| count_from(rest, triples, &b))
        .sum()
}

/// Bag count of solutions of `patterns` over the union of the stores, one
/// triple at a time.
pub fn nested_loop_count(patterns: &[&TriplePattern], stores: &[TripleStore]) -> u64 {
    let triples: Vec<&Triple> = stores.iter().flat_map(|s| s.triples()).collect();
    count_from(patterns, &triples, &HashMap::new())
}

/// Relevance by a plain scan of each store.
pub fn linear_scan_relevant(tp: &TriplePattern, stores: &[TripleStore]) -> Vec<String> {
    stores
        .iter()
        .filter(|s| nested_loop_count(&[tp], std::slice::from_ref(s)) > 0)
        .map(|s| s.name().to_string())
        .collect()
}

/// Ordered pair of finite positive vectors of equal length.
pub fn random_vectors(rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let n = rng.gen_range(1..=8);
    let mut draw = || {
        let exp: f64 = rng.gen_range(-2.0..6.0);
        10f64.powf(exp)
    };
    let r: Vec<f64> = (0..n).map(|_| draw()).collect();
    let e: Vec<f64> = (0..n).map(|_| draw()).collect();
    (r, e)
}

/// Estimates read from tables: leaves by ordinal, joins by the set of
/// ordinals below them. Missing joins get the product of their leaves
/// divided by `divisor`.
pub struct TableEstimator {
    pub leaves: Vec<f64>,
    pub joins: Vec<(Vec<usize>, f64)>,
    pub divisor: f64,
}

impl fedcard::estimators::PlanEstimator for TableEstimator {
    fn leaf(&self, tp: &TriplePattern) -> fedcard::estimators::NodeEstimate {
        fedcard::estimators::NodeEstimate::exact(self.leaves[tp.ordinal])
    }

    fn join(
        &self,
        node: &fedcard::estimators::Expression,
        _left: &fedcard::estimators::Expression,
        _right: &fedcard::estimators::Expression,
        _lc: f64,
        _rc: f64,
    ) -> fedcard::estimators::NodeEstimate {
        let key: Vec<usize> = node.ordinals().into_iter().collect();
        let value = self
            .joins
            .iter()
            .find(|(k, _)| *k == key)
            .map(|(_, v)| *v)
            .unwrap_or_else(|| key.iter().map(|&o| self.leaves[o]).product::<f64>() / self.divisor);
        fedcard::estimators::NodeEstimate::exact(value)
    }
}

/// Engine 1 of the three-pattern star example.
pub fn star_engine1() -> TableEstimator {
    TableEstimator {
        leaves: vec![90.0, 250.0, 300.0],
        joins: vec![(vec![0, 1], 65.0), (vec![0, 1, 2], 150.0)],
        divisor: 100.0,
    }
}

/// Engine 2 of the same example.
pub fn star_engine2() -> TableEstimator {
    TableEstimator {
        leaves: vec![200.0, 600.0, 500.0],
        joins: vec![],
        divisor: 1000.0,
    }
}
