use std::f64::consts::FRAC_1_SQRT_2;

use super::{Engine, EstimateCard, Expression, SourceSelection, SourceSet};
use crate::query::{JoinEdge, Position, TriplePattern};
use crate::summaries::CostFedSummary;

/// Pattern cardinality by the bound/unbound case table, summed over the
/// relevant sources.
pub fn costfed_tp_card(
    tp: &TriplePattern,
    summary: &CostFedSummary,
    sources: &SourceSet,
) -> EstimateCard {
    let bs = tp.subject.is_bound();
    let bo = tp.object.is_bound();
    let mut total = 0.0;
    if sources.is_empty() {
        return EstimateCard::new(Engine::CostFed, 0.0);
    }
    if tp.predicate.is_bound() && bs && bo {
        return EstimateCard::new(Engine::CostFed, 1.0);
    }
    for d in sources.iter().filter_map(|name| summary.source(name)) {
        total += match tp.predicate_iri() {
            Some(p) => {
                let Some(stats) = d.predicate(p) else { continue };
                let t = stats.triples as f64;
                match (bs, bo) {
                    (false, false) => t,
                    (true, false) => t * stats.avg_subject_selectivity,
                    (false, true) => t * stats.avg_object_selectivity,
                    (true, true) => unreachable!("handled above"),
                }
            }
            None => {
                let t = d.total_triples as f64;
                let inv = |n: u64| if n == 0 { 0.0 } else { 1.0 / n as f64 };
                match (bs, bo) {
                    (false, false) => t,
                    (true, false) => t * inv(d.total_subjects),
                    (false, true) => t * inv(d.total_objects),
                    (true, true) => t * inv(d.total_subjects) * inv(d.total_objects),
                }
            }
        };
    }
    EstimateCard::new(Engine::CostFed, total)
}

/// The multi-valued predicate factor `M(E)`.
///
/// Only leaves get a factor other than 1. For a leaf with bound predicate and
/// unbound subject: a bound object gives `1/√2`; otherwise a join on the
/// subject gives `C(E) / distinct subjects`, a join on the object gives
/// `C(E) / distinct objects`. Distinct counts are summed over the leaf's
/// sources; a zero count falls through to 1.
pub fn costfed_multiplicity(
    expr: &Expression,
    card: f64,
    edges: &[JoinEdge],
    summary: &CostFedSummary,
    sources: &SourceSelection,
) -> f64 {
    let Some(tp) = expr.as_leaf() else {
        return 1.0;
    };
    let Some(p) = tp.predicate_iri() else {
        return 1.0;
    };
    if tp.subject.is_bound() {
        return 1.0;
    }
    if tp.object.is_bound() {
        return FRAC_1_SQRT_2;
    }
    let joined_on = |pos: Position| edges.iter().any(|e| e.position_in(tp.ordinal) == Some(pos));
    let distinct = |subjects: bool| -> u64 {
        sources
            .get(tp.ordinal)
            .iter()
            .filter_map(|name| summary.source(name))
            .filter_map(|d| d.predicate(p))
            .map(|s| if subjects { s.distinct_subjects } else { s.distinct_objects })
            .sum()
    };
    if joined_on(Position::Subject) {
        let n = distinct(true);
        if n > 0 {
            return card / n as f64;
        }
    } else if joined_on(Position::Object) {
        let n = distinct(false);
        if n > 0 {
            return card / n as f64;
        }
    }
    1.0
}

/// `M(E1) · M(E2) · min(C(E1), C(E2))`.
pub fn costfed_join_card(
    e1: &Expression,
    e2: &Expression,
    c1: EstimateCard,
    c2: EstimateCard,
    edges: &[JoinEdge],
    summary: &CostFedSummary,
    sources: &SourceSelection,
) -> EstimateCard {
    let m1 = costfed_multiplicity(e1, c1.value, edges, summary, sources);
    let m2 = costfed_multiplicity(e2, c2.value, edges, summary, sources);
    EstimateCard::new(Engine::CostFed, m1 * m2 * c1.value.min(c2.value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::query::parse_query;
    use crate::summaries::build_costfed;

    fn setup(query: &str) -> (crate::query::BasicGraphPattern, CostFedSummary, SourceSelection) {
        let stores = vec![fixtures::toy1()];
        let bgp = parse_query(query).unwrap();
        let sel = SourceSelection::uniform(&bgp, &SourceSet::new(["A"]));
        (bgp, build_costfed(&stores), sel)
    }

    fn card(query: &str) -> f64 {
        let (bgp, summary, sel) = setup(query);
        costfed_tp_card(&bgp.patterns[0], &summary, sel.get(0)).value
    }

    #[test]
    fn pattern_cases_on_toy1() {
        assert_eq!(card("SELECT * WHERE { ?x <http://x/p> ?y }"), 3.0);
        assert_eq!(card("SELECT * WHERE { <http://x/s1> <http://x/p> ?y }"), 1.5);
        assert_eq!(card("SELECT * WHERE { ?x <http://x/p> <http://x/o1> }"), 1.5);
        assert_eq!(card("SELECT * WHERE { <http://x/s9> <http://x/p> <http://x/o9> }"), 1.0);
        assert_eq!(card("SELECT * WHERE { ?x ?pr ?y }"), 5.0);
        assert!((card("SELECT * WHERE { <http://x/s1> ?pr ?y }") - 5.0 / 3.0).abs() < 1e-12);
        assert!((card("SELECT * WHERE { ?x ?pr <http://x/o1> }") - 5.0 / 3.0).abs() < 1e-12);
        assert!((card("SELECT * WHERE { <http://x/s1> ?pr <http://x/o1> }") - 5.0 / 9.0).abs() < 1e-12);
        assert_eq!(card("SELECT * WHERE { ?x <http://x/zzz> ?y }"), 0.0);
    }

    #[test]
    fn empty_sources_give_zero_even_when_fully_bound() {
        let (bgp, summary, _) = setup("SELECT * WHERE { <http://x/s1> <http://x/p> <http://x/o1> }");
        assert_eq!(costfed_tp_card(&bgp.patterns[0], &summary, &SourceSet::default()).value, 0.0);
    }

    #[test]
    fn subject_join_on_toy1() {
        let (bgp, summary, sel) =
            setup("SELECT * WHERE { ?x <http://x/p> ?y . ?x <http://x/q> ?z }");
        let edges = bgp.join_edges();
        let l = Expression::leaf(bgp.patterns[0].clone());
        let r = Expression::leaf(bgp.patterns[1].clone());
        let c1 = costfed_tp_card(&bgp.patterns[0], &summary, sel.get(0));
        let c2 = costfed_tp_card(&bgp.patterns[1], &summary, sel.get(1));
        assert_eq!(costfed_multiplicity(&l, c1.value, &edges, &summary, &sel), 1.5);
        assert_eq!(costfed_multiplicity(&r, c2.value, &edges, &summary, &sel), 1.0);
        let j = costfed_join_card(&l, &r, c1, c2, &edges, &summary, &sel);
        assert_eq!(j.value, 3.0);
    }

    #[test]
    fn bound_object_leaf_uses_inverse_sqrt_two() {
        let (bgp, summary, sel) =
            setup("SELECT * WHERE { ?x <http://x/p> <http://x/o1> . ?x <http://x/q> ?z }");
        let edges = bgp.join_edges();
        let l = Expression::leaf(bgp.patterns[0].clone());
        let m = costfed_multiplicity(&l, 1.5, &edges, &summary, &sel);
        assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn other_cases_reduce_to_min() {
        let (bgp, summary, sel) = setup("SELECT * WHERE { ?x ?a ?y . ?x ?b ?z }");
        let edges = bgp.join_edges();
        let l = Expression::leaf(bgp.patterns[0].clone());
        let r = Expression::leaf(bgp.patterns[1].clone());
        let k = EstimateCard::new(Engine::CostFed, 7.0);
        assert_eq!(costfed_join_card(&l, &r, k, k, &edges, &summary, &sel).value, 7.0);
        // join nodes contribute 1
        let j = Expression::join(l.clone(), r.clone(), &edges);
        assert_eq!(costfed_multiplicity(&j, 99.0, &edges, &summary, &sel), 1.0);
    }
}
