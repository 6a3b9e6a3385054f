//! q-error and similarity error over cardinality vectors.

use serde::{Deserialize, Serialize};

use crate::trace::CardinalityTrace;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("vector lengths differ: {real} real vs {estimated} estimated")]
    LengthMismatch { real: usize, estimated: usize },
    #[error("empty cardinality vector")]
    Empty,
    #[error("entry {0} is not a finite positive number")]
    BadEntry(usize),
}

fn check_lengths(real: &[f64], est: &[f64]) -> Result<(), MetricError> {
    if real.len() != est.len() {
        return Err(MetricError::LengthMismatch {
            real: real.len(),
            estimated: est.len(),
        });
    }
    if real.is_empty() {
        return Err(MetricError::Empty);
    }
    Ok(())
}

/// `max_i max(e_i / r_i, r_i / e_i)`. Entries must be finite and positive.
pub fn q_error(real: &[f64], est: &[f64]) -> Result<f64, MetricError> {
    check_lengths(real, est)?;
    let mut worst: f64 = 1.0;
    for (i, (&r, &e)) in real.iter().zip(est).enumerate() {
        if !(r.is_finite() && e.is_finite() && r > 0.0 && e > 0.0) {
            return Err(MetricError::BadEntry(i));
        }
        worst = worst.max((e / r).max(r / e));
    }
    Ok(worst)
}

/// `‖r − e‖ / (‖r‖ + ‖e‖)`; zero when both vectors are zero.
pub fn similarity_error(real: &[f64], est: &[f64]) -> Result<f64, MetricError> {
    check_lengths(real, est)?;
    for (i, (&r, &e)) in real.iter().zip(est).enumerate() {
        if !(r.is_finite() && e.is_finite() && r >= 0.0 && e >= 0.0) {
            return Err(MetricError::BadEntry(i));
        }
    }
    let norm = |v: &mut dyn Iterator<Item = f64>| v.map(|x| x * x).sum::<f64>().sqrt();
    let diff = norm(&mut real.iter().zip(est).map(|(r, e)| r - e));
    let denom = norm(&mut real.iter().copied()) + norm(&mut est.iter().copied());
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok((diff / denom).clamp(0.0, 1.0))
}

/// `max(v, 1)` for every entry, with the indices that changed.
pub fn clamp_for_q_error(values: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut clamped = Vec::new();
    let out = values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            if v < 1.0 {
                clamped.push(i);
                1.0
            } else {
                v
            }
        })
        .collect();
    (out, clamped)
}

/// All metrics of one (query, engine) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricBundle {
    pub query_id: String,
    pub engine: String,
    pub q_t: f64,
    pub q_j: f64,
    pub q_p: f64,
    pub e_t: f64,
    pub e_j: f64,
    pub e_p: f64,
    /// Positions in the plan vector (patterns, then joins) clamped up to 1
    /// for the q-error.
    pub clamped: Vec<usize>,
    /// The plan has no joins; `q_j` and `e_j` are placeholders.
    pub no_joins: bool,
}

fn q_clamped(real: &[f64], est: &[f64]) -> Result<(f64, Vec<usize>), MetricError> {
    let (r, mut cr) = clamp_for_q_error(real);
    let (e, ce) = clamp_for_q_error(est);
    cr.extend(ce);
    cr.sort_unstable();
    cr.dedup();
    Ok((q_error(&r, &e)?, cr))
}

pub fn bundle(trace: &CardinalityTrace) -> Result<MetricBundle, MetricError> {
    let (q_t, _) = q_clamped(&trace.tp_real, &trace.tp_est)?;
    let e_t = similarity_error(&trace.tp_real, &trace.tp_est)?;
    let no_joins = trace.join_real.is_empty() && trace.join_est.is_empty();
    let (q_j, e_j) = if no_joins {
        (1.0, 0.0)
    } else {
        (
            q_clamped(&trace.join_real, &trace.join_est)?.0,
            similarity_error(&trace.join_real, &trace.join_est)?,
        )
    };
    let p_real = trace.plan_real();
    let p_est = trace.plan_est();
    let (q_p, clamped) = q_clamped(&p_real, &p_est)?;
    let e_p = similarity_error(&p_real, &p_est)?;
    Ok(MetricBundle {
        query_id: trace.query_id.clone(),
        engine: trace.engine.clone(),
        q_t,
        q_j,
        q_p,
        e_t,
        e_j,
        e_p,
        clamped,
        no_joins,
    })
}
