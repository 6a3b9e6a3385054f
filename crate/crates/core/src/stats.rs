//! Rank correlation and simple and robust linear regression.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("vector lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} points, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("zero rank variance")]
    ZeroRankVariance,
    #[error("constant predictor")]
    ConstantPredictor,
    #[error("non-finite input at index {0}")]
    NonFinite(usize),
}

fn validate(x: &[f64], y: &[f64], needed: usize) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < needed {
        return Err(StatsError::TooFew { needed, got: x.len() });
    }
    if let Some(i) = x.iter().zip(y).position(|(a, b)| !a.is_finite() || !b.is_finite()) {
        return Err(StatsError::NonFinite(i));
    }
    Ok(())
}

/// 1-based ranks; tied values share the average of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = avg;
        }
        i = j + 1;
    }
    ranks
}

fn weighted_moments(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(a, w)| a * w).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(b, w)| b * w).sum::<f64>() / sw;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for ((a, b), w) in x.iter().zip(y).zip(w) {
        let (dx, dy) = (a - mx, b - my);
        sxx += w * dx * dx;
        syy += w * dy * dy;
        sxy += w * dx * dy;
    }
    (mx, my, sxx, syy, sxy)
}

/// Weighted Pearson correlation; `None` when either side has no variance.
pub fn weighted_pearson(x: &[f64], y: &[f64], w: &[f64]) -> Option<f64> {
    let (_, _, sxx, syy, sxy) = weighted_moments(x, y, w);
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    weighted_pearson(x, y, &vec![1.0; x.len()])
}

/// Two-sided p-value of a correlation coefficient via Student's t with
/// `n - 2` degrees of freedom.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    if n < 3 {
        return 1.0;
    }
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let df = (n - 2) as f64;
    let t = r * (df / (1.0 - r * r)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("positive degrees of freedom");
    (2.0 * (1.0 - dist.cdf(t.abs()))).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Largest sample size whose p-value is computed by full enumeration of
/// permutations.
pub const EXACT_PERMUTATION_MAX_N: usize = 10;

/// Share of permutations of `ry` whose |rho| reaches the observed one.
/// The rank spreads do not change under permutation, so only the cross
/// product is tracked, updated per swap. Centred ranks are multiples of
/// 0.5, which keeps the running sum exact.
fn permutation_p_value(rx: &[f64], ry: &[f64], rho: f64) -> f64 {
    let n = ry.len();
    let centred = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / n as f64;
        v.iter().map(|a| a - m).collect::<Vec<_>>()
    };
    let cx = centred(rx);
    let mut p = centred(ry);
    let spread = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let target = (rho.abs() - 1e-12) * spread(&cx) * spread(&p);
    let mut dot: f64 = cx.iter().zip(&p).map(|(a, b)| a * b).sum();
    let mut hits = u64::from(dot.abs() >= target);
    let mut total: u64 = 1;
    let mut c = vec![0usize; n];
    let mut i = 0;
    // Heap's algorithm
    while i < n {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            dot += (cx[i] - cx[j]) * (p[j] - p[i]);
            p.swap(i, j);
            total += 1;
            if dot.abs() >= target {
                hits += 1;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

/// Spearman's rank correlation. The p-value is exact for
/// `n <= EXACT_PERMUTATION_MAX_N` and uses the t approximation above that.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    validate(x, y, 3)?;
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let rho = pearson(&rx, &ry).ok_or(StatsError::ZeroRankVariance)?;
    let n = x.len();
    let p_value = if n <= EXACT_PERMUTATION_MAX_N {
        permutation_p_value(&rx, &ry, rho)
    } else {
        correlation_p_value(rho, n)
    };
    Ok(CorrelationResult { rho, p_value, n })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub intercept: f64,
    pub slope: f64,
    /// Pearson correlation; weighted by the final weights for IRLS.
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
    pub weights: Option<Vec<f64>>,
    /// Indices of points whose final weight fell below `OUTLIER_WEIGHT`.
    pub outliers: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
}

fn weighted_fit(x: &[f64], y: &[f64], w: &[f64]) -> Result<(f64, f64), StatsError> {
    let (mx, my, sxx, _, sxy) = weighted_moments(x, y, w);
    if sxx <= 0.0 || !sxx.is_finite() {
        return Err(StatsError::ConstantPredictor);
    }
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// Ordinary least squares `y = a + b·x`.
pub fn ols(x: &[f64], y: &[f64]) -> Result<RegressionResult, StatsError> {
    validate(x, y, 3)?;
    let ones = vec![1.0; x.len()];
    let (intercept, slope) = weighted_fit(x, y, &ones)?;
    let r = pearson(x, y).unwrap_or(0.0);
    Ok(RegressionResult {
        intercept,
        slope,
        r,
        p_value: correlation_p_value(r, x.len()),
        n: x.len(),
        weights: None,
        outliers: Vec::new(),
        iterations: 0,
        converged: true,
    })
}

pub const HUBER_K: f64 = 1.345;
pub const MAD_SCALE: f64 = 0.6745;
pub const IRLS_TOLERANCE: f64 = 1e-8;
pub const IRLS_MAX_ITERATIONS: usize = 50;
pub const OUTLIER_WEIGHT: f64 = 0.95;

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

fn huber_weights(residuals: &[f64]) -> Vec<f64> {
    let mut abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    let sigma = median(&mut abs) / MAD_SCALE;
    residuals
        .iter()
        .map(|r| {
            let r = r.abs();
            if r == 0.0 {
                1.0
            } else {
                (HUBER_K * sigma / r).min(1.0)
            }
        })
        .collect()
}

/// Robust regression by iteratively re-weighted least squares with Huber
/// weights. The scale is the median absolute residual over 0.6745, taken
/// again at every step. Stops when no coefficient moves by more than
/// `IRLS_TOLERANCE`, or after `IRLS_MAX_ITERATIONS` steps with
/// `converged = false`.
pub fn irls_huber(x: &[f64], y: &[f64]) -> Result<RegressionResult, StatsError> {
    validate(x, y, 4)?;
    let mut weights = vec![1.0; x.len()];
    let (mut a, mut b) = weighted_fit(x, y, &weights)?;
    // residuals at rounding level count as exact fits
    let noise = 1e-12 * y.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut iterations = 0;
    let mut converged = false;
    while iterations < IRLS_MAX_ITERATIONS {
        let residuals: Vec<f64> = x
            .iter()
            .zip(y)
            .map(|(xi, yi)| yi - (a + b * xi))
            .map(|r| if r.abs() <= noise { 0.0 } else { r })
            .collect();
        weights = huber_weights(&residuals);
        let (na, nb) = weighted_fit(x, y, &weights)?;
        iterations += 1;
        let change = (na - a).abs().max((nb - b).abs());
        a = na;
        b = nb;
        if change < IRLS_TOLERANCE {
            converged = true;
            break;
        }
    }
    let r = weighted_pearson(x, y, &weights).unwrap_or(0.0);
    let outliers = weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w < OUTLIER_WEIGHT)
        .map(|(i, _)| i)
        .collect();
    Ok(RegressionResult {
        intercept: a,
        slope: b,
        r,
        p_value: correlation_p_value(r, x.len()),
        n: x.len(),
        weights: Some(weights),
        outliers,
        iterations,
        converged,
    })
}

/// Strength bands for a correlation coefficient, judged on its magnitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    VeryWeak,
    Weak,
    Moderate,
    Strong,
    VeryStrong,
}

impl Band {
    pub fn of(coefficient: f64) -> Band {
        let c = coefficient.abs();
        if c < 0.2 {
            Band::VeryWeak
        } else if c < 0.4 {
            Band::Weak
        } else if c < 0.6 {
            Band::Moderate
        } else if c < 0.8 {
            Band::Strong
        } else {
            Band::VeryStrong
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Band::VeryWeak => "very weak",
            Band::Weak => "weak",
            Band::Moderate => "moderate",
            Band::Strong => "strong",
            Band::VeryStrong => "very strong",
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}
