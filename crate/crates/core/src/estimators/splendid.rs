use std::collections::BTreeMap;

use super::{distinct_values, ratio_or_zero, Engine, EstimateCard, Expression, SourceSelection, SourceSet};
use crate::query::{JoinEdge, TriplePattern};
use crate::summaries::{VoidStats, VoidSummary};

/// Per-source pattern cardinality `card_d`. Selectivities are inverse
/// distinct counts; a fully bound pattern is estimated like `(s, ?, o)` and a
/// fully unbound one as `|d|`.
fn card_in_source(tp: &TriplePattern, d: &VoidStats) -> f64 {
    let size = d.triples as f64;
    let sel_s = ratio_or_zero(1.0, d.distinct_subjects as f64);
    let sel_o = ratio_or_zero(1.0, d.distinct_objects as f64);
    match (tp.subject.is_bound(), tp.predicate_iri(), tp.object.is_bound()) {
        (false, None, false) => size,
        (false, Some(p), false) => d.predicate(p).triples as f64,
        (true, None, false) => size * sel_s,
        (true, Some(p), false) => {
            let s = d.predicate(p);
            ratio_or_zero(s.triples as f64, s.distinct_subjects as f64)
        }
        (false, None, true) => size * sel_o,
        (false, Some(p), true) => {
            let s = d.predicate(p);
            ratio_or_zero(s.triples as f64, s.distinct_objects as f64)
        }
        (true, _, true) => size * sel_s * sel_o,
    }
}

pub fn splendid_tp_card(tp: &TriplePattern, summary: &VoidSummary, sources: &SourceSet) -> EstimateCard {
    let total = sources
        .iter()
        .filter_map(|name| summary.source(name))
        .map(|d| card_in_source(tp, d))
        .sum();
    EstimateCard::new(Engine::Splendid, total)
}

/// Cardinality of a group of patterns sharing one subject variable: the
/// smallest bound-object pattern cardinality (1 when there is none) times,
/// for each unbound-object pattern, its cardinality scaled by the source's
/// subject selectivity. Computed per source and summed.
pub fn splendid_star_card(
    patterns: &[TriplePattern],
    summary: &VoidSummary,
    sources: &SourceSet,
) -> EstimateCard {
    let mut total = 0.0;
    for d in sources.iter().filter_map(|name| summary.source(name)) {
        let sel_s = ratio_or_zero(1.0, d.distinct_subjects as f64);
        let bound_min = patterns
            .iter()
            .filter(|tp| tp.object.is_bound())
            .map(|tp| card_in_source(tp, d))
            .reduce(f64::min)
            .unwrap_or(1.0);
        let unbound: f64 = patterns
            .iter()
            .filter(|tp| !tp.object.is_bound())
            .map(|tp| sel_s * card_in_source(tp, d))
            .product();
        total += bound_min * unbound;
    }
    EstimateCard::new(Engine::Splendid, total)
}

/// Selectivity of one side of a join variable: `1 / distinct values` at the
/// variable's position, or 1 without statistics.
fn positional_selectivity(
    tp: &TriplePattern,
    edge: &JoinEdge,
    summary: &VoidSummary,
    sources: &SourceSelection,
) -> f64 {
    let position = edge.position_in(tp.ordinal).expect("edge touches pattern");
    let n = distinct_values(tp, position, summary, sources.get(tp.ordinal));
    if n == 0 {
        1.0
    } else {
        1.0 / n as f64
    }
}

/// `card(q1) · card(q2) · sel⋈`, where `sel⋈` averages, over the shared
/// variables, the mean of the two sides' positional selectivities.
/// With no shared variable the join is a cartesian product.
pub fn splendid_join_card(
    e1: &Expression,
    e2: &Expression,
    c1: EstimateCard,
    c2: EstimateCard,
    edges: &[JoinEdge],
    summary: &VoidSummary,
    sources: &SourceSelection,
) -> EstimateCard {
    let mut per_var: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for edge in edges {
        let lookup = |ordinal| e1.find_leaf(ordinal).or_else(|| e2.find_leaf(ordinal));
        let (Some(a), Some(b)) = (lookup(edge.left), lookup(edge.right)) else {
            continue;
        };
        let sa = positional_selectivity(a, edge, summary, sources);
        let sb = positional_selectivity(b, edge, summary, sources);
        per_var.entry(edge.variable.as_str()).or_default().push((sa + sb) / 2.0);
    }
    let sel = if per_var.is_empty() {
        1.0
    } else {
        let means: Vec<f64> = per_var
            .values()
            .map(|v| v.iter().sum::<f64>() / v.len() as f64)
            .collect();
        means.iter().sum::<f64>() / means.len() as f64
    };
    EstimateCard::new(Engine::Splendid, c1.value * c2.value * sel)
}
