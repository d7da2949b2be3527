//! One-factor-at-a-time parameter sweeps with repetitions.
//!
//! Run `i` of sweep point `j` uses seed `seed_base + j·reps + i`. A sweep
//! executes in two passes: all simulations (with encounter-time estimates),
//! then one through-origin β regression for the whole sweep, then a fit of
//! every diffusion curve with reference time constant β·τ_ideal.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_mdl, FitContext, FitResult};
use crate::micro::{estimate_tau_empirical, fit_beta, tau_ideal, BetaFit, MicroEstimate};
use crate::mobility::WalkPolicy;
use crate::sim::{self, DiffusionCurve, SimConfig};
use crate::stats;

/// The single parameter varied by a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variable", content = "values")]
pub enum SweepAxis {
    N(Vec<usize>),
    C(Vec<f64>),
    L(Vec<f64>),
    Walk(Vec<WalkPolicy>),
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::N(_) => "N",
            SweepAxis::C(_) => "C",
            SweepAxis::L(_) => "L",
            SweepAxis::Walk(_) => "walk",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            SweepAxis::N(v) => v.len(),
            SweepAxis::C(v) | SweepAxis::L(v) => v.len(),
            SweepAxis::Walk(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Swept values, with walks mapped to ρ (all CRW), α (all LW) or their
    /// position in the list otherwise.
    pub fn numeric_values(&self) -> Vec<f64> {
        match self {
            SweepAxis::N(v) => v.iter().map(|&n| n as f64).collect(),
            SweepAxis::C(v) | SweepAxis::L(v) => v.clone(),
            SweepAxis::Walk(v) => {
                if v.iter().all(|w| matches!(w, WalkPolicy::Crw { .. })) {
                    v.iter()
                        .map(|w| match w {
                            WalkPolicy::Crw { rho, .. } => *rho,
                            _ => unreachable!(),
                        })
                        .collect()
                } else if v.iter().all(|w| matches!(w, WalkPolicy::Levy { .. })) {
                    v.iter()
                        .map(|w| match w {
                            WalkPolicy::Levy { alpha, .. } => *alpha,
                            _ => unreachable!(),
                        })
                        .collect()
                } else {
                    (0..v.len()).map(|i| i as f64).collect()
                }
            }
        }
    }

    fn labels(&self) -> Vec<String> {
        match self {
            SweepAxis::N(v) => v.iter().map(|x| x.to_string()).collect(),
            SweepAxis::C(v) | SweepAxis::L(v) => v.iter().map(|x| x.to_string()).collect(),
            SweepAxis::Walk(v) => v.iter().map(|w| w.to_string()).collect(),
        }
    }

    fn apply(&self, k: usize, base: &SimConfig) -> SimConfig {
        let mut cfg = base.clone();
        match self {
            SweepAxis::N(v) => cfg.n = v[k],
            SweepAxis::C(v) => cfg.comm_range = v[k],
            SweepAxis::L(v) => cfg.arena = v[k],
            SweepAxis::Walk(v) => cfg.walk = v[k],
        }
        cfg
    }

    /// Standard parameter studies.
    pub fn table_n() -> Self {
        SweepAxis::N((6..=50).step_by(4).collect())
    }

    pub fn table_c() -> Self {
        SweepAxis::C((6..=50).step_by(4).map(f64::from).collect())
    }

    pub fn table_l() -> Self {
        SweepAxis::L((40..=220).step_by(20).map(f64::from).collect())
    }

    pub fn table_crw() -> Self {
        SweepAxis::Walk((1..=9).map(|k| WalkPolicy::crw(k as f64 / 10.0)).collect())
    }

    pub fn table_levy() -> Self {
        SweepAxis::Walk(
            (14..=28)
                .map(|k| WalkPolicy::levy(k as f64 / 10.0))
                .collect(),
        )
    }

    pub fn table_hybrid() -> Self {
        let mut v = Vec::new();
        for r in (2..=8).step_by(2) {
            for a in (14..=24).step_by(2) {
                v.push(WalkPolicy::hybrid(r as f64 / 10.0, a as f64 / 10.0));
            }
        }
        SweepAxis::Walk(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub axis: SweepAxis,
    pub base: SimConfig,
    pub reps: usize,
    pub seed_base: u64,
}

impl SweepPlan {
    pub fn seed(&self, point: usize, rep: usize) -> u64 {
        self.seed_base + (point * self.reps + rep) as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis.is_empty() {
            return Err(Error::Config("sweep has no values".into()));
        }
        if self.reps == 0 {
            return Err(Error::Config("sweep needs at least one repetition".into()));
        }
        Ok(())
    }
}

/// Fit and propagation summary for one message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRecord {
    pub curve: DiffusionCurve,
    pub fit: Option<FitResult>,
    pub fit_error: Option<String>,
    /// Seconds from emission until every robot held the message.
    pub full_propagation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rep: usize,
    pub seed: u64,
    pub micro: Option<MicroEstimate>,
    pub curves: Vec<CurveRecord>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub median_tau_empirical: Option<f64>,
    pub median_lambda: Option<f64>,
    pub median_tau: Option<f64>,
    pub median_rmse: Option<f64>,
    /// (25th, 50th, 75th) percentiles of full-propagation time over messages
    /// that reached every robot.
    pub propagation_quartiles: Option<(f64, f64, f64)>,
    /// Median full-propagation time counting messages that never finished as
    /// taking the whole remaining observation window.
    pub median_full_propagation: Option<f64>,
    pub completed_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub label: String,
    pub value: f64,
    pub config: SimConfig,
    pub tau_ideal: f64,
    pub runs: Vec<RunRecord>,
    pub summary: PointSummary,
}

impl SweepPoint {
    pub fn fits(&self) -> Vec<FitResult> {
        self.runs
            .iter()
            .flat_map(|r| r.curves.iter().filter_map(|c| c.fit))
            .collect()
    }

    pub fn tau_empirical(&self) -> Vec<f64> {
        self.runs
            .iter()
            .filter_map(|r| r.micro.map(|m| m.tau_empirical))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub variable: String,
    pub reps: usize,
    pub seed_base: u64,
    pub points: Vec<SweepPoint>,
    /// Through-origin regression of τ_empirical on τ_ideal over every run.
    pub beta: Option<BetaFit>,
    pub failed_runs: usize,
}

impl SweepResult {
    pub fn beta_points(&self) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .flat_map(|p| p.tau_empirical().into_iter().map(move |t| (p.tau_ideal, t)))
            .collect()
    }

    /// Swept values paired with per-point medians of `f`.
    pub fn medians(&self, f: impl Fn(&PointSummary) -> Option<f64>) -> (Vec<f64>, Vec<f64>) {
        self.points
            .iter()
            .filter_map(|p| f(&p.summary).map(|m| (p.value, m)))
            .unzip()
    }
}

/// Seconds from emission until the informed fraction first reaches `quantile`,
/// or `None` if the observation ended first.
pub fn propagation_time(curve: &DiffusionCurve, quantile: f64) -> Option<f64> {
    let target = (quantile * curve.robots as f64 - 1e-9).ceil().max(1.0) as usize;
    curve
        .samples
        .iter()
        .find(|s| s.informed >= target)
        .map(|s| s.t - curve.t0)
}

fn simulate(cfg: &SimConfig, rep: usize, tau_ideal: f64) -> RunRecord {
    let mut record = RunRecord {
        rep,
        seed: cfg.seed,
        micro: None,
        curves: Vec::new(),
        error: None,
    };
    match sim::run(cfg) {
        Ok(out) => {
            record.micro =
                estimate_tau_empirical(&out.encounters, cfg.n, cfg.crossing_time(), tau_ideal).ok();
            record.curves = out
                .curves
                .into_iter()
                .map(|curve| CurveRecord {
                    full_propagation: propagation_time(&curve, 1.0),
                    curve,
                    fit: None,
                    fit_error: None,
                })
                .collect();
        }
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

fn summarize(runs: &[RunRecord]) -> PointSummary {
    let curves: Vec<&CurveRecord> = runs.iter().flat_map(|r| &r.curves).collect();
    let fits: Vec<&FitResult> = curves
        .iter()
        .filter_map(|c| c.fit.as_ref())
        .filter(|f| !f.degenerate)
        .collect();
    let taus: Vec<f64> = runs
        .iter()
        .filter_map(|r| r.micro.map(|m| m.tau_empirical))
        .collect();
    let done: Vec<f64> = curves.iter().filter_map(|c| c.full_propagation).collect();
    let censored: Vec<f64> = curves
        .iter()
        .map(|c| c.full_propagation.unwrap_or(c.curve.t_end - c.curve.t0))
        .collect();
    let q = |p| stats::quantile(&done, p);
    PointSummary {
        median_tau_empirical: stats::median(&taus),
        median_lambda: stats::median(&fits.iter().map(|f| f.params.lambda).collect::<Vec<_>>()),
        median_tau: stats::median(&fits.iter().map(|f| f.params.tau).collect::<Vec<_>>()),
        median_rmse: stats::median(&fits.iter().map(|f| f.rmse).collect::<Vec<_>>()),
        propagation_quartiles: q(0.25)
            .zip(q(0.5))
            .zip(q(0.75))
            .map(|((a, b), c)| (a, b, c)),
        median_full_propagation: stats::median(&censored),
        completed_fraction: if curves.is_empty() {
            0.0
        } else {
            done.len() as f64 / curves.len() as f64
        },
    }
}

/// Executes every (point, repetition) simulation, fits all curves and
/// aggregates. Runs execute on the current rayon pool; results are assembled
/// in index order, so the output depends only on the plan.
pub fn run_sweep(plan: &SweepPlan) -> Result<SweepResult> {
    plan.validate()?;
    let labels = plan.axis.labels();
    let values = plan.axis.numeric_values();
    let configs: Vec<SimConfig> = (0..plan.axis.len())
        .map(|k| plan.axis.apply(k, &plan.base))
        .collect();
    let ideals: Vec<f64> = configs
        .iter()
        .map(|c| tau_ideal(c.arena, c.comm_range, c.n, c.speed).unwrap_or(f64::NAN))
        .collect();

    let jobs: Vec<(usize, usize)> = (0..configs.len())
        .flat_map(|j| (0..plan.reps).map(move |i| (j, i)))
        .collect();
    let mut runs: Vec<RunRecord> = jobs
        .par_iter()
        .map(|&(j, i)| {
            let cfg = SimConfig {
                seed: plan.seed(j, i),
                ..configs[j].clone()
            };
            simulate(&cfg, i, ideals[j])
        })
        .collect();

    let failed_runs = runs.iter().filter(|r| r.error.is_some()).count();
    if failed_runs * 10 > runs.len() {
        return Err(Error::Sweep {
            failed: failed_runs,
            total: runs.len(),
        });
    }

    let beta_points: Vec<(f64, f64)> = jobs
        .iter()
        .zip(&runs)
        .filter_map(|(&(j, _), r)| r.micro.map(|m| (ideals[j], m.tau_empirical)))
        .filter(|(x, _)| x.is_finite())
        .collect();
    let beta = fit_beta(&beta_points).ok();
    let beta_value = beta.as_ref().map_or(1.0, |b| b.beta);

    let fit_jobs: Vec<(usize, usize)> = runs
        .iter()
        .enumerate()
        .flat_map(|(r, run)| (0..run.curves.len()).map(move |c| (r, c)))
        .collect();
    let fitted: Vec<Result<FitResult>> = fit_jobs
        .par_iter()
        .map(|&(r, c)| {
            let cfg = &configs[jobs[r].0];
            let ideal = ideals[jobs[r].0];
            let tau_ref = if ideal.is_finite() {
                beta_value * ideal
            } else {
                cfg.duration / 4.0
            };
            fit_mdl(
                &runs[r].curves[c].curve,
                &FitContext {
                    n: cfg.n,
                    tau_ref,
                    dt: cfg.dt,
                },
            )
        })
        .collect();
    for (&(r, c), res) in fit_jobs.iter().zip(fitted) {
        let rec = &mut runs[r].curves[c];
        match res {
            Ok(f) => rec.fit = Some(f),
            Err(e) => rec.fit_error = Some(e.to_string()),
        }
    }

    let mut runs = runs.into_iter();
    let points = configs
        .into_iter()
        .enumerate()
        .map(|(j, config)| {
            let point_runs: Vec<RunRecord> = runs.by_ref().take(plan.reps).collect();
            SweepPoint {
                label: labels[j].clone(),
                value: values[j],
                tau_ideal: ideals[j],
                summary: summarize(&point_runs),
                runs: point_runs,
                config: SimConfig {
                    seed: plan.seed(j, 0),
                    ..config
                },
            }
        })
        .collect();

    Ok(SweepResult {
        variable: plan.axis.name().to_string(),
        reps: plan.reps,
        seed_base: plan.seed_base,
        points,
        beta,
        failed_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::CurveSample;

    fn tiny(axis: SweepAxis, reps: usize) -> SweepPlan {
        SweepPlan {
            axis,
            base: SimConfig {
                arena: 60.0,
                duration: 4.0 * 3600.0,
                msg_window: 2.0 * 3600.0,
                ..SimConfig::default()
            },
            reps,
            seed_base: 100,
        }
    }

    #[test]
    fn seed_discipline() {
        let p = tiny(SweepAxis::N(vec![10, 20, 30]), 4);
        assert_eq!(p.seed(0, 0), 100);
        assert_eq!(p.seed(2, 3), 100 + 2 * 4 + 3);
    }

    #[test]
    fn single_point_single_rep() {
        let r = run_sweep(&tiny(SweepAxis::N(vec![20]), 1)).unwrap();
        assert_eq!(r.points.len(), 1);
        assert_eq!(r.points[0].runs.len(), 1);
        assert_eq!(r.points[0].runs[0].seed, 100);
        assert_eq!(r.points[0].runs[0].curves.len(), 2);
    }

    #[test]
    fn sweep_is_deterministic() {
        let p = tiny(SweepAxis::C(vec![5.0, 10.0]), 2);
        assert_eq!(run_sweep(&p).unwrap(), run_sweep(&p).unwrap());
    }

    #[test]
    fn propagation_times() {
        let c = DiffusionCurve {
            msg_id: 0,
            t0: 1000.0,
            t_end: 5000.0,
            robots: 2,
            samples: vec![
                CurveSample {
                    t: 1000.0,
                    informed: 1,
                },
                CurveSample {
                    t: 1500.0,
                    informed: 2,
                },
            ],
        };
        assert_eq!(propagation_time(&c, 0.5), Some(0.0));
        assert_eq!(propagation_time(&c, 1.0), Some(500.0));
        let stuck = DiffusionCurve {
            samples: vec![c.samples[0]],
            ..c
        };
        assert_eq!(propagation_time(&stuck, 1.0), None);
    }

    #[test]
    fn table_axes() {
        assert_eq!(SweepAxis::table_n().len(), 12);
        assert_eq!(SweepAxis::table_l().len(), 10);
        assert_eq!(SweepAxis::table_crw().numeric_values()[8], 0.9);
        assert_eq!(SweepAxis::table_levy().len(), 15);
        assert_eq!(SweepAxis::table_hybrid().len(), 24);
    }

    #[test]
    fn rejects_empty_plan() {
        assert!(run_sweep(&tiny(SweepAxis::N(vec![]), 1)).is_err());
        assert!(run_sweep(&tiny(SweepAxis::N(vec![20]), 0)).is_err());
    }
}
