//! End-to-end acceptance checks.
//!
//! Each check returns a [`Verdict`] carrying the measured quantities, so a
//! failing check still reports how far off it was. The simulation-based checks
//! share one [`DeskSuite`] of sweeps, which is the expensive part (a few
//! minutes on one core).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::csvio;
use crate::dynamics::{
    gompertz_closed, integrate_combined, linspace, logistic_closed, mdl_blend, MacroParams,
};
use crate::error::Result;
use crate::fit::{fit_observations, lambda_trend, FitContext, FitResult, Observations};
use crate::master::{ensemble_mean, gillespie_ensemble, Regime};
use crate::mobility::WalkPolicy;
use crate::report::Verdict;
use crate::sim::{self, SimConfig, HOUR};
use crate::sim::{detect_encounters, detect_encounters_brute};
use crate::stats;
use crate::sweep::{run_sweep, SweepAxis, SweepPlan, SweepResult};

pub const BETA_RANGE: (f64, f64) = (0.5, 2.0);
pub const MIN_R_SQUARED: f64 = 0.9;
pub const CLOSED_FORM_SUP: f64 = 1e-6;
pub const BLEND_LAMBDAS: [f64; 3] = [0.25, 0.5, 0.75];
pub const BLEND_MAX_RMSE: f64 = 0.03;
pub const BLEND_GRID_POINTS: usize = 1000;
pub const ENSEMBLE_RUNS: usize = 2000;
pub const ENSEMBLE_N: usize = 200;
pub const ENSEMBLE_SIGMAS: f64 = 3.0;
pub const RECOVERY_LAMBDA_TOL: f64 = 0.05;
pub const RECOVERY_TAU_REL_TOL: f64 = 0.02;
pub const RECOVERY_NOISE_SIGMA: f64 = 0.01;
pub const RECOVERY_NOISY_LAMBDA_TOL: f64 = 0.15;
pub const FIT_MAX_MEDIAN_RMSE: f64 = 0.03;
pub const TREND_MAX_P: f64 = 0.05;
pub const WALK_MAX_RANK_CORRELATION: f64 = -0.8;
pub const EXACTNESS_INSTANCES: usize = 500;

/// Swarm sizes for the encounter-time validation sweep.
pub const N_VALUES: [usize; 6] = [6, 14, 22, 30, 38, 46];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub reps: usize,
    pub seed_base: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            reps: 5,
            seed_base: 1000,
        }
    }
}

/// The sweeps every simulation-based check draws from.
#[derive(Debug, Clone)]
pub struct DeskSuite {
    pub n: SweepResult,
    pub c: SweepResult,
    pub l: SweepResult,
    pub crw: SweepResult,
    /// Repetitions of the default configuration alone.
    pub defaults: SweepResult,
}

impl DeskSuite {
    pub fn run(base: &SimConfig, opts: SuiteOptions) -> Result<Self> {
        let sweep = |axis: SweepAxis| {
            run_sweep(&SweepPlan {
                axis,
                base: base.clone(),
                reps: opts.reps,
                seed_base: opts.seed_base,
            })
        };
        Ok(DeskSuite {
            n: sweep(SweepAxis::N(N_VALUES.to_vec()))?,
            c: sweep(SweepAxis::table_c())?,
            l: sweep(SweepAxis::table_l())?,
            crw: sweep(SweepAxis::table_crw())?,
            defaults: sweep(SweepAxis::N(vec![base.n]))?,
        })
    }

    pub fn sweeps(&self) -> [&SweepResult; 5] {
        [&self.n, &self.c, &self.l, &self.crw, &self.defaults]
    }
}

fn verdict(id: u32, name: &str, passed: bool, detail: String) -> Verdict {
    Verdict {
        id: id.to_string(),
        name: name.to_string(),
        passed,
        detail,
    }
}

fn strictly_monotone(ys: &[f64], increasing: bool) -> bool {
    ys.windows(2)
        .all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] })
}

fn rank_correlation(xs: &[f64], ys: &[f64]) -> f64 {
    stats::spearman(xs, ys).unwrap_or(f64::NAN)
}

pub fn micro_validation(suite: &DeskSuite) -> Verdict {
    let mut ok = true;
    let mut detail = String::new();
    match &suite.n.beta {
        Some(b) => {
            let in_range = (BETA_RANGE.0..=BETA_RANGE.1).contains(&b.beta);
            let fits = b.r_squared >= MIN_R_SQUARED;
            ok &= in_range && fits;
            detail += &format!(
                "beta={:.3} (want [{}, {}]) r2={:.3} (want >= {}) over {} runs",
                b.beta,
                BETA_RANGE.0,
                BETA_RANGE.1,
                b.r_squared,
                MIN_R_SQUARED,
                b.points.len()
            );
        }
        None => {
            ok = false;
            detail += "no beta regression";
        }
    }
    let checks = [(&suite.n, false), (&suite.c, false), (&suite.l, true)];
    for (sweep, increasing) in checks {
        let (xs, ys) = sweep.medians(|s| s.median_tau_empirical);
        let complete = xs.len() == sweep.points.len();
        let mono = complete && strictly_monotone(&ys, increasing);
        ok &= mono;
        detail += &format!(
            "; {}: median tau_emp rank corr {:+.3}{}",
            sweep.variable,
            rank_correlation(&xs, &ys),
            if complete { "" } else { " (missing points)" }
        );
    }
    verdict(1, "micro-model validation", ok, detail)
}

pub fn closed_form_equivalence() -> Result<Verdict> {
    let tau = 1000.0;
    let mut worst = [0.0f64; 2];
    for (k, lambda) in [0.0, 1.0].into_iter().enumerate() {
        let p = MacroParams::for_swarm(20, lambda, tau, 0.0);
        let grid = linspace(0.0, 10.0 * tau, 2001);
        let ode = integrate_combined(&p, &grid)?;
        let closed = |t| {
            if lambda == 0.0 {
                logistic_closed(t, &p)
            } else {
                gompertz_closed(t, &p)
            }
        };
        worst[k] = grid
            .iter()
            .zip(&ode)
            .map(|(&t, &i)| (i - closed(t)).abs())
            .fold(0.0, f64::max);
    }
    let ok = worst.iter().all(|&w| w <= CLOSED_FORM_SUP);
    Ok(verdict(
        2,
        "closed-form/ODE equivalence",
        ok,
        format!(
            "sup error logistic {:.2e}, gompertz {:.2e} (want <= {:.0e})",
            worst[0], worst[1], CLOSED_FORM_SUP
        ),
    ))
}

/// RMSE between the blend formula and the integrated combined model on the
/// standard grid, for one λ.
pub fn blend_rmse(lambda: f64) -> Result<f64> {
    let tau = 1000.0;
    let p = MacroParams::for_swarm(20, lambda, tau, 0.0);
    let grid = linspace(0.0, 10.0 * tau, BLEND_GRID_POINTS);
    let ode = integrate_combined(&p, &grid)?;
    let sq: Vec<f64> = grid
        .iter()
        .zip(&ode)
        .map(|(&t, &i)| (mdl_blend(t, &p) - i).powi(2))
        .collect();
    Ok((stats::pairwise_sum(&sq) / sq.len() as f64).sqrt())
}

pub fn blend_quality() -> Result<Verdict> {
    let mut ok = true;
    let mut parts = Vec::new();
    for lambda in BLEND_LAMBDAS {
        let r = blend_rmse(lambda)?;
        ok &= r <= BLEND_MAX_RMSE;
        parts.push(format!("lambda={lambda}: {r:.4}"));
    }
    Ok(verdict(
        3,
        "blend approximation quality",
        ok,
        format!("rmse {} (want <= {})", parts.join(", "), BLEND_MAX_RMSE),
    ))
}

pub fn mean_field_oracle(seed: u64) -> Result<Verdict> {
    let tau = 1000.0;
    let grid = linspace(0.0, 10.0 * tau, 201);
    let mut ok = true;
    let mut parts = Vec::new();
    for (k, regime) in [Regime::Logistic, Regime::Gompertz, Regime::Blend(0.5)]
        .into_iter()
        .enumerate()
    {
        let runs = gillespie_ensemble(
            ENSEMBLE_N,
            tau,
            regime,
            ENSEMBLE_RUNS,
            seed + (k * ENSEMBLE_RUNS) as u64,
        )?;
        let ens = ensemble_mean(&runs, &grid)?;
        let p = MacroParams::for_swarm(ENSEMBLE_N, regime.lambda(), tau, 0.0);
        let ode = integrate_combined(&p, &grid)?;
        let mut outside = 0;
        let mut worst_z = 0.0f64;
        let mut worst_abs = 0.0f64;
        for ((m, se), i) in ens.mean.iter().zip(&ens.stderr).zip(&ode) {
            let d = (m - i).abs();
            worst_abs = worst_abs.max(d);
            // A zero standard error only happens where every run agrees; allow
            // floating-point round-off there.
            if d > ENSEMBLE_SIGMAS * se + 1e-9 {
                outside += 1;
                if *se > 0.0 {
                    worst_z = worst_z.max(d / se);
                }
            }
        }
        ok &= outside == 0;
        parts.push(format!(
            "lambda={}: {outside}/{} points outside, max |diff| {worst_abs:.4}, worst z {worst_z:.1}",
            regime.lambda(),
            grid.len()
        ));
    }
    Ok(verdict(4, "mean-field oracle", ok, parts.join("; ")))
}

fn recover(lambda: f64, tau: f64, noise: Option<(f64, &mut ChaCha8Rng)>) -> Result<FitResult> {
    let p = MacroParams::for_swarm(20, lambda, tau, 0.0);
    let t = linspace(0.0, 8.0 * tau, 1000);
    let mut informed: Vec<f64> = t.iter().map(|&x| mdl_blend(x, &p)).collect();
    if let Some((sigma, rng)) = noise {
        let normal = Normal::new(0.0, sigma).expect("positive sigma");
        for v in &mut informed {
            *v += normal.sample(rng);
        }
    }
    let ctx = FitContext {
        n: 20,
        tau_ref: 2000.0,
        dt: 1.0,
    };
    fit_observations(&Observations { t, informed }, &ctx, 0.0)
}

pub fn parameter_recovery(seed: u64) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    let mut worst_lambda = 0.0f64;
    let mut worst_tau = 0.0f64;
    let mut worst_noisy = 0.0f64;
    for lambda in [0.0, 0.5, 1.0] {
        for tau in [500.0, 4000.0] {
            let clean = recover(lambda, tau, None)?;
            let dl = (clean.params.lambda - lambda).abs();
            let dt = (clean.params.tau / tau - 1.0).abs();
            worst_lambda = worst_lambda.max(dl);
            worst_tau = worst_tau.max(dt);
            ok &= dl <= RECOVERY_LAMBDA_TOL && dt <= RECOVERY_TAU_REL_TOL;

            let noisy = recover(lambda, tau, Some((RECOVERY_NOISE_SIGMA, &mut rng)))?;
            let dn = (noisy.params.lambda - lambda).abs();
            worst_noisy = worst_noisy.max(dn);
            ok &= dn <= RECOVERY_NOISY_LAMBDA_TOL;
        }
    }
    Ok(verdict(
        5,
        "parameter recovery",
        ok,
        format!(
            "noiseless: max |dlambda| {worst_lambda:.4} (want <= {RECOVERY_LAMBDA_TOL}), max rel tau err {worst_tau:.4} \
             (want <= {RECOVERY_TAU_REL_TOL}); noisy: max |dlambda| {worst_noisy:.4} (want <= {RECOVERY_NOISY_LAMBDA_TOL})"
        ),
    ))
}

pub fn empirical_fit_quality(suite: &DeskSuite) -> Verdict {
    let rmses: Vec<f64> = suite
        .defaults
        .points
        .iter()
        .flat_map(|p| p.fits())
        .map(|f| f.rmse)
        .collect();
    let med = stats::median(&rmses);
    let ok = med.is_some_and(|m| m <= FIT_MAX_MEDIAN_RMSE);
    verdict(
        6,
        "empirical fit quality",
        ok,
        format!(
            "median rmse {} over {} curves (want <= {FIT_MAX_MEDIAN_RMSE})",
            med.map_or("n/a".into(), |m| format!("{m:.4}")),
            rmses.len()
        ),
    )
}

pub fn lambda_trends(suite: &DeskSuite) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (sweep, positive) in [(&suite.c, true), (&suite.l, false)] {
        let input: Vec<(f64, Vec<FitResult>)> =
            sweep.points.iter().map(|p| (p.value, p.fits())).collect();
        match lambda_trend(&input) {
            Ok(t) => {
                let dir = t
                    .rho
                    .is_some_and(|r| if positive { r > 0.0 } else { r < 0.0 });
                let sig = t.p_one_sided.is_some_and(|p| p < TREND_MAX_P);
                ok &= dir && sig;
                parts.push(format!(
                    "{}: rho {:+.3} p {:.4} (want {} with p < {TREND_MAX_P})",
                    sweep.variable,
                    t.rho.unwrap_or(f64::NAN),
                    t.p_one_sided.unwrap_or(f64::NAN),
                    if positive { "positive" } else { "negative" }
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("{}: {e}", sweep.variable));
            }
        }
    }
    verdict(7, "lambda trend reproduction", ok, parts.join("; "))
}

pub fn walk_ordering(suite: &DeskSuite) -> Verdict {
    let (xs, ys) = suite.crw.medians(|s| s.median_full_propagation);
    let complete = xs.len() == suite.crw.points.len();
    let rho = rank_correlation(&xs, &ys);
    let ok = complete && rho <= WALK_MAX_RANK_CORRELATION;
    let times: Vec<String> = ys.iter().map(|y| format!("{y:.0}")).collect();
    verdict(
        8,
        "walk-regime ordering",
        ok,
        format!(
            "median full propagation [{}] s over rho 0.1..0.9, rank corr {rho:+.3} (want <= {WALK_MAX_RANK_CORRELATION})",
            times.join(", ")
        ),
    )
}

/// Serialized encounter log and diffusion curves of one run.
pub fn run_fingerprint(config: &SimConfig) -> Result<Vec<u8>> {
    let out = sim::run(config)?;
    let mut bytes = Vec::new();
    csvio::write_encounters(&mut bytes, &out.encounters)?;
    csvio::write_curves(&mut bytes, &out.curves)?;
    Ok(bytes)
}

pub fn exactness(seed: u64) -> Result<Verdict> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut total_pairs = 0;
    for _ in 0..EXACTNESS_INSTANCES {
        let n = rng.random_range(0..=300usize);
        let arena = rng.random_range(10.0..500.0);
        let range = rng.random_range(0.5..arena * 0.5);
        // Half the instances snap to a coarse lattice so that exact-range
        // distances and coincident robots occur.
        let snap = rng.random_bool(0.5);
        let pos: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let (x, y): (f64, f64) =
                    (rng.random_range(0.0..arena), rng.random_range(0.0..arena));
                if snap {
                    let s = range / 4.0;
                    ((x / s).round() * s, (y / s).round() * s)
                } else {
                    (x, y)
                }
            })
            .collect();
        let fast = detect_encounters(&pos, range);
        let brute = detect_encounters_brute(&pos, range);
        total_pairs += brute.len();
        if fast != brute {
            mismatches += 1;
        }
    }

    let base = SimConfig {
        duration: 4.0 * HOUR,
        msg_window: 2.0 * HOUR,
        ..SimConfig::default()
    };
    let configs = [
        base.clone(),
        SimConfig {
            walk: WalkPolicy::levy(1.6),
            seed: 7,
            ..base.clone()
        },
        SimConfig {
            walk: WalkPolicy::hybrid(0.4, 2.0),
            n: 40,
            seed: 11,
            ..base.clone()
        },
    ];
    let mut identical = 0;
    for c in &configs {
        if run_fingerprint(c)? == run_fingerprint(c)? {
            identical += 1;
        }
    }
    let ok = mismatches == 0 && identical == configs.len();
    Ok(verdict(
        9,
        "exactness and determinism",
        ok,
        format!(
            "{mismatches}/{EXACTNESS_INSTANCES} spatial-hash mismatches ({total_pairs} pairs checked); \
             {identical}/{} configs rerun byte-identical",
            configs.len()
        ),
    ))
}

/// Every check, in order, against a prepared suite.
pub fn evaluate(suite: &DeskSuite, seed: u64) -> Result<Vec<Verdict>> {
    Ok(vec![
        micro_validation(suite),
        closed_form_equivalence()?,
        blend_quality()?,
        mean_field_oracle(seed)?,
        parameter_recovery(seed)?,
        empirical_fit_quality(suite),
        lambda_trends(suite),
        walk_ordering(suite),
        exactness(seed)?,
    ])
}
