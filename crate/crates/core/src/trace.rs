//! Real and estimated cardinalities side by side for one plan.

use serde::{Deserialize, Serialize};

use crate::estimators::{estimate_plan, Expression, PlanEstimator};
use crate::oracle::{Oracle, OracleError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CardinalityTrace {
    pub query_id: String,
    pub engine: String,
    /// By pattern ordinal.
    pub tp_real: Vec<f64>,
    pub tp_est: Vec<f64>,
    /// By join node, post-order.
    pub join_real: Vec<f64>,
    pub join_est: Vec<f64>,
    pub plan: Option<Expression>,
    /// Per node: patterns first, then joins.
    pub fallback_flags: Vec<bool>,
}

impl CardinalityTrace {
    pub fn from_vectors(
        query_id: impl Into<String>,
        engine: impl Into<String>,
        tp_real: Vec<f64>,
        tp_est: Vec<f64>,
        join_real: Vec<f64>,
        join_est: Vec<f64>,
    ) -> Self {
        let nodes = tp_est.len() + join_est.len();
        CardinalityTrace {
            query_id: query_id.into(),
            engine: engine.into(),
            tp_real,
            tp_est,
            join_real,
            join_est,
            plan: None,
            fallback_flags: vec![false; nodes],
        }
    }

    /// Pattern vector followed by the join vector.
    pub fn plan_real(&self) -> Vec<f64> {
        self.tp_real.iter().chain(&self.join_real).copied().collect()
    }

    pub fn plan_est(&self) -> Vec<f64> {
        self.tp_est.iter().chain(&self.join_est).copied().collect()
    }

    pub fn fallback_used(&self) -> bool {
        self.fallback_flags.iter().any(|&f| f)
    }
}

/// Estimates every node of `plan` and counts it exactly.
pub fn trace_plan<E: PlanEstimator + ?Sized>(
    query_id: &str,
    engine: &str,
    plan: &Expression,
    estimator: &E,
    oracle: &mut Oracle<'_>,
) -> Result<CardinalityTrace, OracleError> {
    let est = estimate_plan(estimator, plan);
    let real = oracle.plan_counts(plan)?;
    let fallback_flags = est
        .leaves
        .values()
        .chain(est.joins.iter())
        .map(|n| n.fallback)
        .collect();
    Ok(CardinalityTrace {
        query_id: query_id.to_string(),
        engine: engine.to_string(),
        tp_real: real.tp_vector(),
        tp_est: est.tp_vector(),
        join_real: real.join_vector(),
        join_est: est.join_vector(),
        plan: Some(plan.clone()),
        fallback_flags,
    })
}
