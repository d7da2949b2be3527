//! Macroscopic diffusion laws for the informed fraction `I(t)`.
//!
//! * logistic (well mixed):       dI/dt = I(1−I)/τ
//! * Gompertz (redundant waves):  dI/dt = (I/τ)·ln(1/I)
//! * combined:                    dI/dt = λ·Gompertz + (1−λ)·logistic
//!
//! Only λ = 0 and λ = 1 have closed forms; [`mdl_blend`] approximates the
//! combined law by the same λ-mixture of the two closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Lower clamp for `I` inside the integrator, keeps `ln(1/I)` finite.
pub const I_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroParams {
    /// Gompertz weight in [0, 1].
    pub lambda: f64,
    /// Time constant, seconds.
    pub tau: f64,
    /// Start time, seconds.
    pub t0: f64,
    /// Informed fraction at `t0`.
    pub i0: f64,
    pub n: usize,
}

impl MacroParams {
    /// Parameters for a swarm of `n` robots starting from a single informed
    /// robot, `I0 = 1/n`.
    pub fn for_swarm(n: usize, lambda: f64, tau: f64, t0: f64) -> Self {
        MacroParams {
            lambda,
            tau,
            t0,
            i0: 1.0 / n as f64,
            n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(domain(format!(
                "lambda must lie in [0, 1], got {}",
                self.lambda
            )));
        }
        if !(self.tau > 0.0) {
            return Err(domain(format!("tau must be positive, got {}", self.tau)));
        }
        if !(self.i0 > 0.0 && self.i0 < 1.0) {
            return Err(domain(format!("I0 must lie in (0, 1), got {}", self.i0)));
        }
        Ok(())
    }
}

pub fn logistic_rate(i: f64, tau: f64) -> f64 {
    i * (1.0 - i) / tau
}

/// `(I/τ)·ln(1/I)`, extended by continuity to 0 at `I = 0`.
pub fn gompertz_rate(i: f64, tau: f64) -> f64 {
    if i <= 0.0 || i >= 1.0 {
        0.0
    } else {
        -i * i.ln() / tau
    }
}

pub fn combined_rate(i: f64, p: &MacroParams) -> f64 {
    p.lambda * gompertz_rate(i, p.tau) + (1.0 - p.lambda) * logistic_rate(i, p.tau)
}

pub fn logistic_closed(t: f64, p: &MacroParams) -> f64 {
    let decay = (-(t - p.t0) / p.tau).exp();
    p.i0 / (p.i0 + (1.0 - p.i0) * decay)
}

/// `exp(ln I0 · e^{−(t−t0)/τ})`, the Gompertz solution with `I(t0) = I0`.
pub fn gompertz_closed(t: f64, p: &MacroParams) -> f64 {
    let decay = (-(t - p.t0) / p.tau).exp();
    (p.i0.ln() * decay).exp()
}

pub fn mdl_blend(t: f64, p: &MacroParams) -> f64 {
    p.lambda * gompertz_closed(t, p) + (1.0 - p.lambda) * logistic_closed(t, p)
}

/// Integrates the combined law with classical fixed-step RK4 and samples it on
/// `grid`, which must start at `t0` and be nondecreasing.
///
/// The internal step is `min(grid spacing, τ/1000)` unless `max_step` is given.
pub fn integrate_combined(p: &MacroParams, grid: &[f64]) -> Result<Vec<f64>> {
    integrate_combined_with_step(p, grid, p.tau / 1000.0)
}

pub fn integrate_combined_with_step(
    p: &MacroParams,
    grid: &[f64],
    max_step: f64,
) -> Result<Vec<f64>> {
    p.validate()?;
    if grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Input("time grid must be nondecreasing".into()));
    }
    let Some(&first) = grid.first() else {
        return Ok(Vec::new());
    };
    if (first - p.t0).abs() > 1e-9 * p.tau.max(p.t0.abs()).max(1.0) {
        return Err(Error::Input(format!(
            "time grid must start at t0 = {}, got {first}",
            p.t0
        )));
    }
    if !(max_step > 0.0) {
        return Err(Error::Input(format!(
            "step must be positive, got {max_step}"
        )));
    }

    let f = |i: f64| combined_rate(i.clamp(I_FLOOR, 1.0), p);
    let mut out = Vec::with_capacity(grid.len());
    let mut i = p.i0;
    out.push(i);
    for w in grid.windows(2) {
        let span = w[1] - w[0];
        if span > 0.0 {
            let steps = (span / max_step).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                let k1 = f(i);
                let k2 = f(i + 0.5 * h * k1);
                let k3 = f(i + 0.5 * h * k2);
                let k4 = f(i + h * k3);
                i = (i + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)).clamp(I_FLOOR, 1.0);
            }
        }
        out.push(i);
    }
    Ok(out)
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let h = (end - start) / (n - 1) as f64;
            (0..n)
                .map(|k| {
                    if k == n - 1 {
                        end
                    } else {
                        start + h * k as f64
                    }
                })
                .collect()
        }
    }
}
