use serde::{Deserialize, Serialize};

use super::{
    independence_number, lovasz_theta_with, power_tuple, strong_power, Graph, GraphError, Limits,
    Result, ThetaOptions,
};

/// Slack allowed between the best lower bound and the theta upper bound.
pub const THETA_GAP_TOLERANCE: f64 = 1e-6;

/// Result for one block length `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEntry {
    pub n: usize,
    /// `alpha(G^n)`, absent when the power was skipped.
    pub alpha: Option<usize>,
    /// `log2(alpha) / n` in bits per channel use.
    pub rate: Option<f64>,
    /// Witness independent set as tuples of base vertices.
    pub witness: Option<Vec<Vec<usize>>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityBounds {
    pub per_n: Vec<RateEntry>,
    /// Largest computed rate.
    pub best_lower: Option<f64>,
    /// Block length attaining `best_lower` (smallest such `n`).
    pub best_n: Option<usize>,
    pub theta: Option<f64>,
    /// `log2(theta)` in bits per channel use; when the SDP stops early this is
    /// the log of its certified upper bound instead.
    pub theta_upper: Option<f64>,
    pub theta_error: Option<String>,
    /// `best_lower <= theta_upper + THETA_GAP_TOLERANCE` (true when either is missing).
    pub consistent: bool,
}

/// Lower bounds `log2(alpha(G^n)) / n` for `n = 1..=n_max` and the upper
/// bound `log2(theta(G))`. Per-entry failures are recorded, not returned.
pub fn capacity_bounds(
    g: &Graph,
    n_max: usize,
    theta: &ThetaOptions,
    limits: &Limits,
) -> Result<CapacityBounds> {
    if n_max == 0 {
        return Err(GraphError::ZeroPower);
    }
    let base = g.vertex_count();
    let mut per_n = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let entry = match strong_power(g, n, limits).and_then(|p| independence_number(&p, limits)) {
            Ok(set) => RateEntry {
                n,
                alpha: Some(set.size),
                rate: (set.size > 0).then(|| (set.size as f64).log2() / n as f64),
                witness: Some(set.vertices.iter().map(|&v| power_tuple(v, base, n)).collect()),
                error: None,
            },
            Err(e) => RateEntry {
                n,
                alpha: None,
                rate: None,
                witness: None,
                error: Some(e.to_string()),
            },
        };
        per_n.push(entry);
    }

    let mut best: Option<(f64, usize)> = None;
    for e in &per_n {
        if let Some(r) = e.rate {
            if best.is_none_or(|(b, _)| r > b) {
                best = Some((r, e.n));
            }
        }
    }

    // An unconverged solve still certifies its upper bracket end.
    let (theta_value, theta_bound, theta_error) = match lovasz_theta_with(g, theta) {
        Ok(sol) => (Some(sol.theta), Some(sol.upper_bound), None),
        Err(e @ GraphError::NotConverged { upper, .. }) => (None, Some(upper), Some(e.to_string())),
        Err(e) => (None, None, Some(e.to_string())),
    };
    let theta_upper = theta_value.or(theta_bound).map(f64::log2);
    let consistent = match (best, theta_upper) {
        (Some((lo, _)), Some(up)) => lo <= up + THETA_GAP_TOLERANCE,
        _ => true,
    };
    Ok(CapacityBounds {
        per_n,
        best_lower: best.map(|b| b.0),
        best_n: best.map(|b| b.1),
        theta: theta_value,
        theta_upper,
        theta_error,
        consistent,
    })
}
