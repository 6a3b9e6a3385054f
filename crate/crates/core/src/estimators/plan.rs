use std::collections::BTreeMap;

use super::odyssey::star_eligible;
use super::{
    costfed_join_card, costfed_tp_card, lhd_join_card, lhd_tp_card, odyssey_star_card, semagrow_join_card,
    semagrow_join_selectivity, semagrow_tp_card, splendid_join_card, splendid_star_card, splendid_tp_card, Engine,
    EstimateCard, Expression, OdysseyShape, SourceSelection, SourceSet,
};
use crate::query::{JoinEdge, TriplePattern};
use crate::summaries::Summaries;

/// Estimate at one plan node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeEstimate {
    pub value: f64,
    /// Set when the engine's own formula did not apply and a substitute was
    /// used.
    pub fallback: bool,
}

impl NodeEstimate {
    pub fn exact(value: f64) -> Self {
        NodeEstimate { value, fallback: false }
    }

    pub fn fallback(value: f64) -> Self {
        NodeEstimate { value, fallback: true }
    }
}

/// Something that can estimate every node of a plan.
pub trait PlanEstimator: Sync {
    fn leaf(&self, tp: &TriplePattern) -> NodeEstimate;

    /// `left` and `right` are the children of `node`, already estimated as
    /// `lc` and `rc`.
    fn join(&self, node: &Expression, left: &Expression, right: &Expression, lc: f64, rc: f64) -> NodeEstimate;

    /// Estimate of the root of `expr`.
    fn cardinality(&self, expr: &Expression) -> f64 {
        estimate_plan(self, expr).root()
    }
}

/// Per-node estimates of one plan.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanEstimates {
    /// Leaf estimates by pattern ordinal.
    pub leaves: BTreeMap<usize, NodeEstimate>,
    /// Join estimates in post-order.
    pub joins: Vec<NodeEstimate>,
}

impl PlanEstimates {
    pub fn root(&self) -> f64 {
        match self.joins.last() {
            Some(j) => j.value,
            None => self.leaves.values().next().map_or(0.0, |l| l.value),
        }
    }

    pub fn tp_vector(&self) -> Vec<f64> {
        self.leaves.values().map(|n| n.value).collect()
    }

    pub fn join_vector(&self) -> Vec<f64> {
        self.joins.iter().map(|n| n.value).collect()
    }

    pub fn any_fallback(&self) -> bool {
        self.leaves.values().chain(self.joins.iter()).any(|n| n.fallback)
    }
}

/// Bottom-up estimation of every node of `plan`.
pub fn estimate_plan<E: PlanEstimator + ?Sized>(estimator: &E, plan: &Expression) -> PlanEstimates {
    fn walk<E: PlanEstimator + ?Sized>(e: &E, expr: &Expression, out: &mut PlanEstimates) -> f64 {
        match expr {
            Expression::Leaf(tp) => {
                let n = e.leaf(tp);
                out.leaves.insert(tp.ordinal, n);
                n.value
            }
            Expression::Join { left, right, .. } => {
                let lc = walk(e, left, out);
                let rc = walk(e, right, out);
                let n = e.join(expr, left, right, lc, rc);
                out.joins.push(n);
                n.value
            }
        }
    }
    let mut out = PlanEstimates::default();
    walk(estimator, plan, &mut out);
    out
}

/// Estimator backed by the statistics of one engine.
pub struct EngineEstimator<'a> {
    pub engine: Engine,
    pub summaries: &'a Summaries,
    pub selection: &'a SourceSelection,
    /// All join edges of the query.
    pub query_edges: &'a [JoinEdge],
}

impl<'a> EngineEstimator<'a> {
    pub fn new(
        engine: Engine,
        summaries: &'a Summaries,
        selection: &'a SourceSelection,
        query_edges: &'a [JoinEdge],
    ) -> Self {
        EngineEstimator {
            engine,
            summaries,
            selection,
            query_edges,
        }
    }

    fn sources_of(&self, leaves: &[&TriplePattern]) -> SourceSet {
        leaves
            .iter()
            .fold(SourceSet::default(), |acc, tp| acc.union(self.selection.get(tp.ordinal)))
    }

    fn card(&self, value: EstimateCard) -> NodeEstimate {
        NodeEstimate::exact(value.value)
    }

    fn splendid_star(&self, leaves: &[&TriplePattern]) -> Option<EstimateCard> {
        if leaves.len() < 2 {
            return None;
        }
        let subject = leaves[0].subject.as_var()?;
        let shared = leaves
            .iter()
            .all(|tp| tp.subject.as_var() == Some(subject) && tp.predicate.is_bound());
        if !shared {
            return None;
        }
        let owned: Vec<TriplePattern> = leaves.iter().map(|tp| (*tp).clone()).collect();
        Some(splendid_star_card(&owned, &self.summaries.void, &self.sources_of(leaves)))
    }
}

impl PlanEstimator for EngineEstimator<'_> {
    fn leaf(&self, tp: &TriplePattern) -> NodeEstimate {
        let sources = self.selection.get(tp.ordinal);
        let s = self.summaries;
        match self.engine {
            Engine::CostFed => self.card(costfed_tp_card(tp, &s.costfed, sources)),
            Engine::Splendid => self.card(splendid_tp_card(tp, &s.void, sources)),
            Engine::Lhd => self.card(lhd_tp_card(tp, &s.void, sources)),
            Engine::SemaGrow => self.card(semagrow_tp_card(tp, &s.void, sources)),
            Engine::Odyssey => {
                if star_eligible(tp) {
                    let star = [tp.clone()];
                    self.card(odyssey_star_card(&star, false, &s.charsets, sources))
                } else {
                    NodeEstimate::fallback(lhd_tp_card(tp, &s.void, sources).value)
                }
            }
        }
    }

    fn join(&self, node: &Expression, left: &Expression, right: &Expression, lc: f64, rc: f64) -> NodeEstimate {
        let s = self.summaries;
        let sel = self.selection;
        let crossing: &[JoinEdge] = match node {
            Expression::Join { edges, .. } => edges,
            Expression::Leaf(_) => &[],
        };
        match self.engine {
            Engine::CostFed => {
                let c1 = EstimateCard::new(Engine::CostFed, lc);
                let c2 = EstimateCard::new(Engine::CostFed, rc);
                self.card(costfed_join_card(left, right, c1, c2, crossing, &s.costfed, sel))
            }
            Engine::Splendid => {
                let leaves = node.leaves();
                if let Some(star) = self.splendid_star(&leaves) {
                    return self.card(star);
                }
                let c1 = EstimateCard::new(Engine::Splendid, lc);
                let c2 = EstimateCard::new(Engine::Splendid, rc);
                self.card(splendid_join_card(left, right, c1, c2, crossing, &s.void, sel))
            }
            Engine::Lhd => {
                let leaves = node.leaves();
                let cards: Vec<EstimateCard> = leaves
                    .iter()
                    .map(|tp| lhd_tp_card(tp, &s.void, sel.get(tp.ordinal)))
                    .collect();
                let edges: Vec<JoinEdge> = node.internal_edges().into_iter().cloned().collect();
                self.card(lhd_join_card(&leaves, &cards, &edges, &s.void, sel))
            }
            Engine::SemaGrow => {
                let c1 = EstimateCard::new(Engine::SemaGrow, lc);
                let c2 = EstimateCard::new(Engine::SemaGrow, rc);
                self.card(semagrow_join_card(c1, c2, left, right, self.query_edges, &s.void, sel))
            }
            Engine::Odyssey => {
                let leaves = node.leaves();
                let sources = self.sources_of(&leaves);
                match OdysseyShape::of(&leaves).estimate(&s.charsets, &sources) {
                    Some(card) => self.card(card),
                    None => {
                        let js = semagrow_join_selectivity(left, self.query_edges, &s.void, sel)
                            .min(semagrow_join_selectivity(right, self.query_edges, &s.void, sel));
                        NodeEstimate::fallback(EstimateCard::new(Engine::Odyssey, lc * rc * js).value)
                    }
                }
            }
        }
    }
}
