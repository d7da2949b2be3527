//! Exact stochastic simulation of the informed count as a pure-birth jump
//! process, used to check the mean-field laws against ensemble averages.
//!
//! From state `n` the process jumps to `n + 1` after an exponential waiting
//! time with rate
//!
//! ```text
//! logistic:  W(n) = (n/τ)·(N−n)/N
//! Gompertz:  W(n) = (n/τ)·ln(N/n)
//! blend(λ):  W(n) = λ·Gompertz + (1−λ)·logistic
//! ```
//!
//! Both rates vanish at `n = N`, which is absorbing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::stats::pairwise_sum;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Regime {
    Logistic,
    Gompertz,
    Blend(f64),
}

impl Regime {
    pub fn lambda(self) -> f64 {
        match self {
            Regime::Logistic => 0.0,
            Regime::Gompertz => 1.0,
            Regime::Blend(l) => l,
        }
    }

    /// Transition rate `W(n → n+1)`.
    pub fn rate(self, n: usize, total: usize, tau: f64) -> f64 {
        if n == 0 || n >= total {
            return 0.0;
        }
        let (nf, tf) = (n as f64, total as f64);
        let logistic = nf / tau * (tf - nf) / tf;
        let gompertz = nf / tau * (tf / nf).ln();
        let lam = self.lambda();
        lam * gompertz + (1.0 - lam) * logistic
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;

    /// `logistic`, `gompertz` or `blend:<lambda>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logistic" => Ok(Regime::Logistic),
            "gompertz" => Ok(Regime::Gompertz),
            other => other
                .strip_prefix("blend:")
                .and_then(|l| l.parse::<f64>().ok())
                .filter(|l| (0.0..=1.0).contains(l))
                .map(Regime::Blend)
                .ok_or_else(|| Error::Input(format!("unrecognized regime '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpTrajectory {
    /// `(t, n)` after each jump, starting with `(0, 1)`.
    pub jumps: Vec<(f64, usize)>,
    pub n: usize,
}

impl JumpTrajectory {
    /// Informed count at time `t`.
    pub fn count_at(&self, t: f64) -> usize {
        let idx = self.jumps.partition_point(|&(tj, _)| tj <= t);
        if idx == 0 {
            0
        } else {
            self.jumps[idx - 1].1
        }
    }
}

/// One exact trajectory from a single informed robot at t = 0.
pub fn gillespie_run<R: Rng + ?Sized>(
    n: usize,
    tau: f64,
    regime: Regime,
    rng: &mut R,
) -> Result<JumpTrajectory> {
    if n < 2 {
        return Err(domain(format!("need at least 2 robots, got {n}")));
    }
    if !(tau > 0.0) {
        return Err(domain(format!("tau must be positive, got {tau}")));
    }
    let mut jumps = Vec::with_capacity(n);
    let (mut t, mut k) = (0.0, 1usize);
    jumps.push((t, k));
    loop {
        let w = regime.rate(k, n, tau);
        if w <= 0.0 {
            break;
        }
        // 1 − U lies in (0, 1], so the logarithm is finite
        let u: f64 = rng.random();
        t += -(1.0 - u).ln() / w;
        k += 1;
        jumps.push((t, k));
    }
    Ok(JumpTrajectory { jumps, n })
}

/// `runs` independent trajectories; run `i` uses seed `seed + i`.
pub fn gillespie_ensemble(
    n: usize,
    tau: f64,
    regime: Regime,
    runs: usize,
    seed: u64,
) -> Result<Vec<JumpTrajectory>> {
    (0..runs as u64)
        .into_par_iter()
        .map(|i| {
            gillespie_run(
                n,
                tau,
                regime,
                &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(i)),
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleCurve {
    pub t: Vec<f64>,
    /// Ensemble mean of `n(t)/N`.
    pub mean: Vec<f64>,
    /// Standard error of the mean.
    pub stderr: Vec<f64>,
}

/// Mean informed fraction over the ensemble at each grid time, with its
/// standard error.
pub fn ensemble_mean(trajectories: &[JumpTrajectory], grid: &[f64]) -> Result<EnsembleCurve> {
    let Some(first) = trajectories.first() else {
        return Err(Error::Input("empty ensemble".into()));
    };
    if trajectories.iter().any(|tr| tr.n != first.n) {
        return Err(Error::Input(
            "trajectories have different swarm sizes".into(),
        ));
    }
    let total = first.n as f64;
    let m = trajectories.len() as f64;
    let mut mean = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    let mut vals = Vec::with_capacity(trajectories.len());
    for &t in grid {
        vals.clear();
        vals.extend(trajectories.iter().map(|tr| tr.count_at(t) as f64 / total));
        let mu = pairwise_sum(&vals) / m;
        let dev: Vec<f64> = vals.iter().map(|v| (v - mu) * (v - mu)).collect();
        let var = if m > 1.0 {
            pairwise_sum(&dev) / (m - 1.0)
        } else {
            0.0
        };
        mean.push(mu);
        stderr.push((var / m).sqrt());
    }
    Ok(EnsembleCurve {
        t: grid.to_vec(),
        mean,
        stderr,
    })
}

/// Empirical distribution `P_n(t)` for `n = 0..=N`.
pub fn occupancy_at(trajectories: &[JumpTrajectory], t: f64) -> Vec<f64> {
    let Some(first) = trajectories.first() else {
        return Vec::new();
    };
    let mut hist = vec![0.0; first.n + 1];
    for tr in trajectories {
        hist[tr.count_at(t)] += 1.0;
    }
    let m = trajectories.len() as f64;
    hist.iter_mut().for_each(|h| *h /= m);
    hist
}
