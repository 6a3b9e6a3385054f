use super::{distinct_values, ratio_or_zero, Engine, EstimateCard, SourceSelection, SourceSet};
use crate::query::{JoinEdge, JoinKind, Position, TriplePattern};
use crate::summaries::{VoidStats, VoidSummary};

fn sum_over<F>(summary: &VoidSummary, sources: &SourceSet, f: F) -> f64
where
    F: Fn(&VoidStats) -> f64,
{
    sources.iter().filter_map(|name| summary.source(name)).map(f).sum()
}

/// `(Σ t / n) / Σ n` for a bound slot, where `n` is the distinct count at that
/// position (per predicate when the predicate is bound).
fn bound_slot_selectivity(
    tp: &TriplePattern,
    position: Position,
    summary: &VoidSummary,
    sources: &SourceSet,
) -> f64 {
    let pick = |d: &VoidStats| -> (f64, f64) {
        match tp.predicate_iri() {
            Some(p) => {
                let s = d.predicate(p);
                let n = if position == Position::Subject { s.distinct_subjects } else { s.distinct_objects };
                (s.triples as f64, n as f64)
            }
            None => {
                let n = if position == Position::Subject { d.distinct_subjects } else { d.distinct_objects };
                (d.triples as f64, n as f64)
            }
        }
    };
    let num = sum_over(summary, sources, |d| {
        let (t, n) = pick(d);
        ratio_or_zero(t, n)
    });
    let den = sum_over(summary, sources, |d| pick(d).1);
    ratio_or_zero(num, den)
}

/// `card(T) = t · sel(S) · sel(P) · sel(O)` with `t` summed over the relevant
/// sources.
pub fn lhd_tp_card(tp: &TriplePattern, summary: &VoidSummary, sources: &SourceSet) -> EstimateCard {
    let t = sum_over(summary, sources, |d| d.triples as f64);
    let sel_s = if tp.subject.is_bound() {
        bound_slot_selectivity(tp, Position::Subject, summary, sources)
    } else {
        1.0
    };
    let sel_o = if tp.object.is_bound() {
        bound_slot_selectivity(tp, Position::Object, summary, sources)
    } else {
        1.0
    };
    // sel(P) is applied as a numerator/denominator pair so that an unbound
    // pattern with a bound predicate comes out exactly as Σ t_dp.
    let value = match tp.predicate_iri() {
        Some(p) => {
            let tp_sum = sum_over(summary, sources, |d| d.predicate(p).triples as f64);
            ratio_or_zero(t * sel_s * sel_o * tp_sum, t)
        }
        None => t * sel_s * sel_o,
    };
    EstimateCard::new(Engine::Lhd, value)
}

/// Selectivity of a single join edge between `t1` and `t2`.
///
/// Each side contributes its distinct count at the join position, per
/// predicate, divided by the source-wide distinct count at that position.
/// An unbound predicate contributes the source-wide count, so its ratio is 1.
/// Edges through a predicate position have selectivity 1.
pub fn lhd_edge_selectivity(
    edge: &JoinEdge,
    t1: &TriplePattern,
    t2: &TriplePattern,
    summary: &VoidSummary,
    sources: &SourceSelection,
) -> f64 {
    if edge.kind == JoinKind::PredicateInvolved {
        return 1.0;
    }
    let side = |tp: &TriplePattern| -> (f64, f64) {
        let position = edge.position_in(tp.ordinal).expect("edge touches pattern");
        let set = sources.get(tp.ordinal);
        let per_predicate = distinct_values(tp, position, summary, set) as f64;
        let whole = sum_over(summary, set, |d| match position {
            Position::Subject => d.distinct_subjects as f64,
            _ => d.distinct_objects as f64,
        });
        (per_predicate, whole)
    };
    let (n1, d1) = side(t1);
    let (n2, d2) = side(t2);
    ratio_or_zero(n1 * n2, d1 * d2)
}

/// `Π card(T_i) · Π sel(edge)` over the edges among `leaves`.
pub fn lhd_join_card(
    leaves: &[&TriplePattern],
    cards: &[EstimateCard],
    edges: &[JoinEdge],
    summary: &VoidSummary,
    sources: &SourceSelection,
) -> EstimateCard {
    let product: f64 = cards.iter().map(|c| c.value).product();
    let find = |ordinal: usize| leaves.iter().find(|tp| tp.ordinal == ordinal).copied();
    let mut sel = 1.0;
    for edge in edges {
        if let (Some(a), Some(b)) = (find(edge.left), find(edge.right)) {
            sel *= lhd_edge_selectivity(edge, a, b, summary, sources);
        }
    }
    EstimateCard::new(Engine::Lhd, product * sel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::query::{parse_query, BasicGraphPattern};
    use crate::summaries::build_void;

    fn setup(query: &str) -> (BasicGraphPattern, VoidSummary, SourceSelection) {
        let bgp = parse_query(query).unwrap();
        let sel = SourceSelection::uniform(&bgp, &SourceSet::new(["A"]));
        (bgp, build_void(&[fixtures::toy1()]), sel)
    }

    fn card(query: &str) -> f64 {
        let (bgp, v, sel) = setup(query);
        lhd_tp_card(&bgp.patterns[0], &v, sel.get(0)).value
    }

    #[test]
    fn pattern_cases_on_toy1() {
        assert_eq!(card("SELECT * WHERE { ?x <http://x/p> ?y }"), 3.0);
        assert!((card("SELECT * WHERE { <http://x/s1> <http://x/p> ?y }") - 2.25).abs() < 1e-12);
        assert_eq!(card("SELECT * WHERE { ?x ?pr ?y }"), 5.0);
        // (5/3)/3 = 5/9, times t = 5
        assert!((card("SELECT * WHERE { <http://x/s1> ?pr ?y }") - 25.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn subject_subject_join() {
        let (bgp, v, sel) = setup("SELECT * WHERE { ?x <http://x/p> ?y . ?x <http://x/q> ?z }");
        let leaves: Vec<_> = bgp.patterns.iter().collect();
        let cards: Vec<_> = leaves.iter().map(|tp| lhd_tp_card(tp, &v, sel.get(tp.ordinal))).collect();
        let j = lhd_join_card(&leaves, &cards, &bgp.join_edges(), &v, &sel);
        assert!((j.value - 8.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn subject_object_selectivity() {
        let (bgp, v, sel) = setup("SELECT * WHERE { ?a <http://x/p> ?b . ?c <http://x/q> ?a }");
        let edges = bgp.join_edges();
        let s = lhd_edge_selectivity(&edges[0], &bgp.patterns[0], &bgp.patterns[1], &v, &sel);
        assert!((s - 2.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn no_shared_variable_is_a_product() {
        let (bgp, v, sel) = setup("SELECT * WHERE { ?a <http://x/p> ?b . ?c <http://x/q> ?d }");
        let leaves: Vec<_> = bgp.patterns.iter().collect();
        let cards = [EstimateCard::new(Engine::Lhd, 4.0), EstimateCard::new(Engine::Lhd, 5.0)];
        assert_eq!(lhd_join_card(&leaves, &cards, &bgp.join_edges(), &v, &sel).value, 20.0);
    }

    #[test]
    fn predicate_edges_are_neutral() {
        let (bgp, v, sel) = setup("SELECT * WHERE { ?a ?p ?b . ?c ?p ?d }");
        let edges = bgp.join_edges();
        assert_eq!(lhd_edge_selectivity(&edges[0], &bgp.patterns[0], &bgp.patterns[1], &v, &sel), 1.0);
    }
}
