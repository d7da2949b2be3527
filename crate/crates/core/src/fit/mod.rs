//! Bounded least-squares fit of the blended model to diffusion curves.
//!
//! Free parameters are λ ∈ [0, 1], τ and t0; `I0 = 1/N` stays fixed. The
//! objective is the RMSE on a uniform 1000-point resampling of the curve and
//! is minimized by simplex descent from a 3×3×3 grid of starts around a
//! reference time constant.

mod simplex;

use serde::{Deserialize, Serialize};

pub use simplex::{minimize, SimplexOptions, SimplexResult};

use crate::dynamics::{linspace, mdl_blend, MacroParams};
use crate::error::{Error, Result};
use crate::sim::DiffusionCurve;
use crate::stats;

/// Number of uniformly spaced points the objective is evaluated on.
pub const RESAMPLE_POINTS: usize = 1000;

/// Scale information for a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitContext {
    pub n: usize,
    /// Reference time constant, typically β·τ_ideal.
    pub tau_ref: f64,
    /// Simulation tick; the lower bound on τ is `10·dt`.
    pub dt: f64,
}

impl FitContext {
    pub fn tau_bounds(&self) -> (f64, f64) {
        (10.0 * self.dt, 100.0 * self.tau_ref)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: MacroParams,
    pub rmse: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    /// The curve never left its initial value; τ is pinned at its upper bound.
    pub degenerate: bool,
}

/// Time/fraction pairs the model is fitted to.
#[derive(Debug, Clone, PartialEq)]
pub struct Observations {
    pub t: Vec<f64>,
    pub informed: Vec<f64>,
}

impl Observations {
    /// Uniform resampling of a curve's step function from emission to the end
    /// of propagation, or to the end of observation if the message never
    /// reached every robot.
    pub fn from_curve(curve: &DiffusionCurve, points: usize) -> Self {
        let end = if curve.fully_propagated() {
            curve.samples.last().map_or(curve.t_end, |s| s.t)
        } else {
            curve.t_end
        };
        let t = linspace(curve.t0, end.max(curve.t0), points);
        let informed = t.iter().map(|&x| curve.fraction_at(x)).collect();
        Observations { t, informed }
    }
}

pub fn rmse_values(obs: &Observations, model: impl Fn(f64) -> f64) -> f64 {
    let sq: Vec<f64> = obs
        .t
        .iter()
        .zip(&obs.informed)
        .map(|(&t, &y)| (model(t) - y).powi(2))
        .collect();
    stats::mean(&sq).map_or(f64::NAN, f64::sqrt)
}

/// RMSE of `model` against the curve's informed fraction at its sample times.
pub fn rmse(curve: &DiffusionCurve, model: impl Fn(f64) -> f64) -> f64 {
    let n = curve.robots as f64;
    let sq: Vec<f64> = curve
        .samples
        .iter()
        .map(|s| (model(s.t) - s.informed as f64 / n).powi(2))
        .collect();
    stats::mean(&sq).map_or(f64::NAN, f64::sqrt)
}

/// Maps between unit-cube coordinates and (λ, τ, t0). τ is log-scaled.
struct Box3 {
    tau_lo: f64,
    tau_hi: f64,
    t0_lo: f64,
    t0_hi: f64,
}

impl Box3 {
    fn decode(&self, u: &[f64]) -> (f64, f64, f64) {
        let lambda = u[0];
        let tau = self.tau_lo * (self.tau_hi / self.tau_lo).powf(u[1]);
        let t0 = self.t0_lo + (self.t0_hi - self.t0_lo) * u[2];
        (lambda, tau, t0)
    }

    fn encode(&self, lambda: f64, tau: f64, t0: f64) -> [f64; 3] {
        let ut = ((tau / self.tau_lo).ln() / (self.tau_hi / self.tau_lo).ln()).clamp(0.0, 1.0);
        let u0 = if self.t0_hi > self.t0_lo {
            ((t0 - self.t0_lo) / (self.t0_hi - self.t0_lo)).clamp(0.0, 1.0)
        } else {
            0.5
        };
        [lambda.clamp(0.0, 1.0), ut, u0]
    }
}

/// Fits (λ, τ, t0) to `obs` for a message emitted at `emission`.
pub fn fit_observations(obs: &Observations, ctx: &FitContext, emission: f64) -> Result<FitResult> {
    if obs.t.len() < 5 || obs.t.len() != obs.informed.len() {
        return Err(Error::Input(format!(
            "need at least 5 observations, got {}",
            obs.t.len()
        )));
    }
    if ctx.n < 2 || !(ctx.tau_ref > 0.0) || !(ctx.dt > 0.0) {
        return Err(Error::Input(format!("invalid fit context {ctx:?}")));
    }
    let (tau_lo, tau_hi) = ctx.tau_bounds();
    if !(tau_hi > tau_lo) {
        return Err(Error::Input(format!(
            "empty tau range [{tau_lo}, {tau_hi}]"
        )));
    }
    let bounds = Box3 {
        tau_lo,
        tau_hi,
        t0_lo: emission - ctx.tau_ref,
        t0_hi: emission + ctx.tau_ref,
    };
    let params = |u: &[f64]| {
        let (lambda, tau, t0) = bounds.decode(u);
        MacroParams::for_swarm(ctx.n, lambda, tau, t0)
    };
    let objective = |u: &[f64]| {
        let p = params(u);
        rmse_values(obs, |t| mdl_blend(t, &p))
    };

    let i0 = 1.0 / ctx.n as f64;
    if obs.informed.iter().all(|&v| v <= i0 + 1e-12) {
        let p = MacroParams::for_swarm(ctx.n, 0.0, tau_hi, emission);
        return Ok(FitResult {
            rmse: rmse_values(obs, |t| mdl_blend(t, &p)),
            params: p,
            n_points: obs.t.len(),
            converged: false,
            iterations: 0,
            degenerate: true,
        });
    }

    let opts = SimplexOptions::default();
    let mut best: Option<SimplexResult> = None;
    let mut iterations = 0;
    for lambda in [0.0, 0.5, 1.0] {
        for tau in [ctx.tau_ref / 3.0, ctx.tau_ref, 3.0 * ctx.tau_ref] {
            for t0 in [
                emission - ctx.tau_ref / 2.0,
                emission,
                emission + ctx.tau_ref / 2.0,
            ] {
                let start = bounds.encode(lambda, tau, t0);
                let r = minimize(objective, &start, &opts);
                iterations += r.iterations;
                if best.as_ref().is_none_or(|b| r.f < b.f) {
                    best = Some(r);
                }
            }
        }
    }
    let best = best.expect("at least one start");
    Ok(FitResult {
        params: params(&best.x),
        rmse: best.f,
        n_points: obs.t.len(),
        converged: best.converged,
        iterations,
        degenerate: false,
    })
}

/// Fits the blended model to an empirical diffusion curve.
pub fn fit_mdl(curve: &DiffusionCurve, ctx: &FitContext) -> Result<FitResult> {
    if curve.samples.len() < 5 && curve.final_informed() > 1 {
        return Err(Error::Input(format!(
            "curve {} has {} samples, need at least 5",
            curve.msg_id,
            curve.samples.len()
        )));
    }
    let obs = Observations::from_curve(curve, RESAMPLE_POINTS);
    fit_observations(
        &obs,
        &FitContext {
            n: curve.robots,
            ..*ctx
        },
        curve.t0,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trend {
    /// Spearman correlation between the swept value and the median λ; `None`
    /// when either is constant.
    pub rho: Option<f64>,
    /// One-sided p-value in the direction of `rho`.
    pub p_one_sided: Option<f64>,
    pub points: usize,
}

/// Rank correlation between a swept variable and the per-point median fitted λ.
pub fn lambda_trend(results: &[(f64, Vec<FitResult>)]) -> Result<Trend> {
    let pts: Vec<(f64, f64)> = results
        .iter()
        .filter_map(|(x, fits)| {
            let lams: Vec<f64> = fits
                .iter()
                .filter(|f| !f.degenerate)
                .map(|f| f.params.lambda)
                .collect();
            stats::median(&lams).map(|m| (*x, m))
        })
        .collect();
    if pts.len() < 4 {
        return Err(Error::Input(format!(
            "need at least 4 sweep points with fits, got {}",
            pts.len()
        )));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let rho = stats::spearman(&xs, &ys);
    Ok(Trend {
        rho,
        p_one_sided: rho.map(|r| stats::spearman_p_one_sided(r, xs.len())),
        points: xs.len(),
    })
}
