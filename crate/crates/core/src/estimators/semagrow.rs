use super::{distinct_values, lhd_tp_card, Engine, EstimateCard, Expression, SourceSelection, SourceSet};
use crate::query::{JoinEdge, TriplePattern};
use crate::summaries::VoidSummary;

/// Leaf estimates reuse the LHD pattern formula.
pub fn semagrow_tp_card(tp: &TriplePattern, summary: &VoidSummary, sources: &SourceSet) -> EstimateCard {
    EstimateCard::new(Engine::SemaGrow, lhd_tp_card(tp, summary, sources).value)
}

fn leaf_selectivity(
    tp: &TriplePattern,
    query_edges: &[JoinEdge],
    summary: &VoidSummary,
    sources: &SourceSelection,
) -> f64 {
    query_edges
        .iter()
        .filter_map(|e| e.position_in(tp.ordinal))
        .map(|position| {
            let d = distinct_values(tp, position, summary, sources.get(tp.ordinal));
            if d == 0 {
                1.0
            } else {
                1.0 / d as f64
            }
        })
        .fold(1.0, f64::min)
}

/// `JoinSel`: for a leaf, the smallest `1/d_i` over its join attributes; for a
/// join, the smaller of its children's.
pub fn semagrow_join_selectivity(
    expr: &Expression,
    query_edges: &[JoinEdge],
    summary: &VoidSummary,
    sources: &SourceSelection,
) -> f64 {
    match expr {
        Expression::Leaf(tp) => leaf_selectivity(tp, query_edges, summary, sources),
        Expression::Join { left, right, .. } => {
            semagrow_join_selectivity(left, query_edges, summary, sources)
                .min(semagrow_join_selectivity(right, query_edges, summary, sources))
        }
    }
}

/// `Card(E1) · Card(E2) · min(JoinSel(E1), JoinSel(E2))`.
pub fn semagrow_join_card(
    c1: EstimateCard,
    c2: EstimateCard,
    e1: &Expression,
    e2: &Expression,
    query_edges: &[JoinEdge],
    summary: &VoidSummary,
    sources: &SourceSelection,
) -> EstimateCard {
    let sel = semagrow_join_selectivity(e1, query_edges, summary, sources)
        .min(semagrow_join_selectivity(e2, query_edges, summary, sources));
    EstimateCard::new(Engine::SemaGrow, c1.value * c2.value * sel)
}
