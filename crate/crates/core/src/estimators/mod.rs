//! Cardinality estimators of five cost-based federation engines.
//!
//! Every estimator is a pure function of a statistics summary and the
//! relevant sources of each pattern. Estimates are real-valued and are never
//! rounded here.

mod costfed;
mod expression;
mod lhd;
mod odyssey;
mod plan;
mod semagrow;
mod sources;
mod splendid;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use costfed::{costfed_join_card, costfed_multiplicity, costfed_tp_card};
pub use expression::Expression;
pub use lhd::{lhd_edge_selectivity, lhd_join_card, lhd_tp_card};
pub use odyssey::{odyssey_linked_card, odyssey_star_card, OdysseyShape};
pub use plan::{estimate_plan, EngineEstimator, NodeEstimate, PlanEstimates, PlanEstimator};
pub use semagrow::{semagrow_join_card, semagrow_join_selectivity, semagrow_tp_card};
pub use sources::{select_sources, SourceSelection, SourceSet};
pub use splendid::{splendid_join_card, splendid_star_card, splendid_tp_card};

use crate::query::{Position, TriplePattern};
use crate::summaries::VoidSummary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Engine {
    CostFed,
    Splendid,
    Lhd,
    SemaGrow,
    Odyssey,
}

impl Engine {
    pub const ALL: [Engine; 5] = [
        Engine::CostFed,
        Engine::Splendid,
        Engine::Lhd,
        Engine::SemaGrow,
        Engine::Odyssey,
    ];

    /// Lowercase name used on the command line and in reports.
    pub fn name(self) -> &'static str {
        match self {
            Engine::CostFed => "costfed",
            Engine::Splendid => "splendid",
            Engine::Lhd => "lhd",
            Engine::SemaGrow => "semagrow",
            Engine::Odyssey => "odyssey",
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown engine `{0}` (valid: costfed, splendid, lhd, semagrow, odyssey)")]
pub struct UnknownEngine(pub String);

impl FromStr for Engine {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Engine::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| UnknownEngine(s.to_string()))
    }
}

/// An estimated result size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateCard {
    pub value: f64,
    pub engine: Engine,
}

impl EstimateCard {
    /// Non-finite or negative inputs are mapped into `[0, f64::MAX]`.
    pub fn new(engine: Engine, value: f64) -> Self {
        let value = if value.is_nan() || value < 0.0 {
            0.0
        } else if value.is_infinite() {
            f64::MAX
        } else {
            value
        };
        EstimateCard { value, engine }
    }
}

/// `a / b`, or `0` when `b` is zero.
pub(crate) fn ratio_or_zero(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        0.0
    } else {
        a / b
    }
}

/// Number of distinct values the pattern's slot at `position` can take,
/// summed over `sources`: per-predicate distinct counts for a bound
/// predicate, whole-source counts otherwise, and the number of distinct
/// predicates for the predicate position.
pub(crate) fn distinct_values(
    tp: &TriplePattern,
    position: Position,
    void: &VoidSummary,
    sources: &SourceSet,
) -> u64 {
    let predicate = tp.predicate_iri();
    sources
        .iter()
        .filter_map(|name| void.source(name))
        .map(|d| match (position, predicate) {
            (Position::Subject, Some(p)) => d.predicate(p).distinct_subjects,
            (Position::Subject, None) => d.distinct_subjects,
            (Position::Object, Some(p)) => d.predicate(p).distinct_objects,
            (Position::Object, None) => d.distinct_objects,
            (Position::Predicate, _) => d.distinct_predicates(),
        })
        .sum()
}
