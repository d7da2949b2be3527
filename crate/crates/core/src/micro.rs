//! Microscopic model: mean free time between encounters.
//!
//! The kinetic-theory estimate treats each robot as sweeping a strip of width
//! `C` through a uniform density `(N−1)/L²` of partners:
//!
//! ```text
//! l_ideal   = L² / (C·(N−1))
//! τ_ideal   = l_ideal / V
//! ```
//!
//! Measured mean free times differ by a factor β = τ / τ_ideal that absorbs
//! finite contact duration and arena boundaries; β is obtained by regression
//! through the origin.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sim::{EdgeKind, EncounterEvent};
use crate::stats;

/// Ideal mean free time `L² / (C·(N−1)·V)` in seconds.
pub fn tau_ideal(arena: f64, comm_range: f64, n: usize, speed: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain(format!("need at least 2 robots to meet, got {n}")));
    }
    if !(arena > 0.0 && comm_range > 0.0 && speed > 0.0) {
        return Err(domain(format!(
            "L, C and V must be positive, got L={arena}, C={comm_range}, V={speed}"
        )));
    }
    Ok(arena * arena / (comm_range * (n - 1) as f64 * speed))
}

/// Ideal mean free path `L² / (C·(N−1))` in meters.
pub fn mean_free_path_ideal(arena: f64, comm_range: f64, n: usize) -> Result<f64> {
    tau_ideal(arena, comm_range, n, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroEstimate {
    pub tau_ideal: f64,
    pub tau_empirical: f64,
    pub n_gaps: usize,
    /// (25th, 75th) percentile of the pooled gaps.
    pub iqr: (f64, f64),
}

/// Pooled inter-encounter gaps from an encounter log.
///
/// Each rising edge counts as an encounter for both robots, except that a
/// rising edge of a pair within `debounce` seconds of that pair's previous
/// rising edge is merged into it. Gaps are taken between consecutive
/// encounters of the same robot; the censored stretches before a robot's first
/// and after its last encounter are not gaps.
pub fn encounter_gaps(log: &[EncounterEvent], n: usize, debounce: f64) -> Vec<f64> {
    let mut last_rise: HashMap<(u32, u32), f64> = HashMap::new();
    let mut times: Vec<Vec<f64>> = vec![Vec::new(); n];
    for e in log.iter().filter(|e| e.kind == EdgeKind::Rising) {
        let merged = last_rise
            .insert((e.a, e.b), e.t)
            .is_some_and(|prev| e.t - prev < debounce);
        if !merged {
            times[e.a as usize].push(e.t);
            times[e.b as usize].push(e.t);
        }
    }
    times
        .iter()
        .flat_map(|ts| ts.windows(2).map(|w| w[1] - w[0]))
        .collect()
}

/// Empirical mean free time from a time-ordered encounter log.
pub fn estimate_tau_empirical(
    log: &[EncounterEvent],
    n: usize,
    debounce: f64,
    tau_ideal: f64,
) -> Result<MicroEstimate> {
    if log.windows(2).any(|w| w[1].t < w[0].t) {
        return Err(Error::Input("encounter log is not sorted by time".into()));
    }
    let mut gaps = encounter_gaps(log, n, debounce);
    if gaps.is_empty() {
        return Err(Error::EstimateUnavailable(
            "no robot had two separate encounters".into(),
        ));
    }
    gaps.sort_by(f64::total_cmp);
    let q = |p| stats::quantile_sorted(&gaps, p).unwrap_or(f64::NAN);
    Ok(MicroEstimate {
        tau_ideal,
        tau_empirical: stats::mean(&gaps).unwrap_or(f64::NAN),
        n_gaps: gaps.len(),
        iqr: (q(0.25), q(0.75)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta: f64,
    /// Uncentred coefficient of determination of the through-origin model.
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

/// Least squares `τ_empirical ≈ β·τ_ideal` through the origin.
pub fn fit_beta(points: &[(f64, f64)]) -> Result<BetaFit> {
    if points.is_empty() {
        return Err(Error::DegenerateRegression("no points".into()));
    }
    if points.iter().any(|&(x, y)| !(x >= 0.0 && y >= 0.0)) {
        return Err(Error::DegenerateRegression(
            "points must be non-negative".into(),
        ));
    }
    let sxy: f64 = points.iter().map(|&(x, y)| x * y).sum();
    let sxx: f64 = points.iter().map(|&(x, _)| x * x).sum();
    let syy: f64 = points.iter().map(|&(_, y)| y * y).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateRegression("all tau_ideal are zero".into()));
    }
    let beta = sxy / sxx;
    let ss_res: f64 = points.iter().map(|&(x, y)| (y - beta * x).powi(2)).sum();
    let r_squared = if syy > 0.0 {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    } else {
        1.0
    };
    Ok(BetaFit {
        beta,
        r_squared,
        points: points.to_vec(),
    })
}
