//! Random-walk mobility for kinematic point robots in a square walled arena.
//!
//! A robot moves along straight *legs* at constant speed. At the end of a leg
//! it draws a new heading and a new leg length according to its
//! [`WalkPolicy`]:
//!
//! | policy | new heading                         | leg length                         |
//! |--------|-------------------------------------|------------------------------------|
//! | CRW    | previous heading + wrapped Cauchy(ρ) | fixed `leg`                        |
//! | LW     | uniform on [−π, π)                   | truncated power law s^(−α)         |
//! | Hybrid | previous heading + wrapped Cauchy(ρ) | truncated power law s^(−α)         |
//!
//! Walls reflect specularly.

use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Default CRW leg length and default minimum Lévy relocation, in meters.
pub const DEFAULT_LEG: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WalkPolicy {
    Crw {
        rho: f64,
        leg: f64,
    },
    Levy {
        alpha: f64,
        min_step: f64,
        /// `None` truncates at the arena diagonal.
        max_step: Option<f64>,
    },
    Hybrid {
        rho: f64,
        alpha: f64,
        min_step: f64,
        max_step: Option<f64>,
    },
}

impl WalkPolicy {
    pub fn crw(rho: f64) -> Self {
        WalkPolicy::Crw {
            rho,
            leg: DEFAULT_LEG,
        }
    }

    pub fn levy(alpha: f64) -> Self {
        WalkPolicy::Levy {
            alpha,
            min_step: DEFAULT_LEG,
            max_step: None,
        }
    }

    pub fn hybrid(rho: f64, alpha: f64) -> Self {
        WalkPolicy::Hybrid {
            rho,
            alpha,
            min_step: DEFAULT_LEG,
            max_step: None,
        }
    }

    /// Checks parameter domains against an arena of side `arena`.
    pub fn validate(&self, arena: f64) -> Result<()> {
        let diag = arena * SQRT_2;
        let check_rho = |rho: f64| {
            if (0.0..=1.0).contains(&rho) {
                Ok(())
            } else {
                Err(domain(format!("rho must lie in [0, 1], got {rho}")))
            }
        };
        let check_levy = |alpha: f64, min: f64, max: Option<f64>| {
            if !(alpha > 1.0) {
                return Err(domain(format!("alpha must exceed 1, got {alpha}")));
            }
            let max = max.unwrap_or(diag);
            if !(min > 0.0 && min <= max && max <= diag * (1.0 + 1e-12)) {
                return Err(domain(format!(
                    "step bounds must satisfy 0 < min <= max <= {diag}, got [{min}, {max}]"
                )));
            }
            Ok(())
        };
        match *self {
            WalkPolicy::Crw { rho, leg } => {
                check_rho(rho)?;
                if !(leg > 0.0) {
                    return Err(domain(format!("CRW leg must be positive, got {leg}")));
                }
                Ok(())
            }
            WalkPolicy::Levy {
                alpha,
                min_step,
                max_step,
            } => check_levy(alpha, min_step, max_step),
            WalkPolicy::Hybrid {
                rho,
                alpha,
                min_step,
                max_step,
            } => {
                check_rho(rho)?;
                check_levy(alpha, min_step, max_step)
            }
        }
    }
}

impl fmt::Display for WalkPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            WalkPolicy::Crw { rho, leg } => {
                write!(f, "crw:{rho}")?;
                if leg != DEFAULT_LEG {
                    write!(f, ",{leg}")?;
                }
                Ok(())
            }
            WalkPolicy::Levy { alpha, .. } => write!(f, "lw:{alpha}"),
            WalkPolicy::Hybrid { rho, alpha, .. } => write!(f, "hybrid:{rho},{alpha}"),
        }
    }
}

impl FromStr for WalkPolicy {
    type Err = Error;

    /// Parses `crw:0.7`, `crw:0.7,5` (with leg length), `lw:2.0` or
    /// `hybrid:0.6,1.8` (rho first, alpha second).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Input(format!("unrecognized walk policy '{s}'"));
        let (kind, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let nums = args
            .split(',')
            .map(|a| a.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        let policy = match (kind.trim().to_ascii_lowercase().as_str(), nums.as_slice()) {
            ("crw", [rho]) => WalkPolicy::crw(*rho),
            ("crw", [rho, leg]) => WalkPolicy::Crw {
                rho: *rho,
                leg: *leg,
            },
            ("lw" | "levy", [alpha]) => WalkPolicy::levy(*alpha),
            ("hybrid", [rho, alpha]) => WalkPolicy::hybrid(*rho, *alpha),
            _ => return Err(bad()),
        };
        Ok(policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    /// Radians in [−π, π).
    pub heading: f64,
}

/// Maps an angle into [−π, π).
pub fn wrap_angle(a: f64) -> f64 {
    let w = a - TAU * ((a + PI) / TAU).floor();
    if w >= PI {
        w - TAU
    } else {
        w
    }
}

/// Draws a turning angle from a wrapped Cauchy distribution centred on zero
/// whose mean resultant length is `rho`.
pub fn sample_turn_crw<R: Rng + ?Sized>(rho: f64, rng: &mut R) -> Result<f64> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(domain(format!("rho must lie in [0, 1], got {rho}")));
    }
    let u: f64 = rng.random();
    let spread = (1.0 - rho) / (1.0 + rho);
    Ok(wrap_angle(2.0 * (spread * (PI * (u - 0.5)).tan()).atan()))
}

/// Quantile function of the power law with density ∝ s^(−alpha) on
/// `[min_step, max_step]`.
pub fn levy_quantile(u: f64, alpha: f64, min_step: f64, max_step: f64) -> f64 {
    if min_step == max_step {
        return min_step;
    }
    let e = 1.0 - alpha;
    let lo = min_step.powf(e);
    let hi = max_step.powf(e);
    (lo + u * (hi - lo)).powf(1.0 / e).clamp(min_step, max_step)
}

/// Draws a relocation length from the truncated power law by inverse CDF.
pub fn sample_step_levy<R: Rng + ?Sized>(
    alpha: f64,
    min_step: f64,
    max_step: f64,
    rng: &mut R,
) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(domain(format!("alpha must exceed 1, got {alpha}")));
    }
    if !(min_step > 0.0 && min_step <= max_step) {
        return Err(domain(format!(
            "step bounds must satisfy 0 < min <= max, got [{min_step}, {max_step}]"
        )));
    }
    Ok(levy_quantile(rng.random(), alpha, min_step, max_step))
}

/// Folds a coordinate back into `[0, len]`; returns whether the direction flipped.
fn fold(mut v: f64, len: f64) -> (f64, bool) {
    let mut flipped = false;
    while v < 0.0 || v > len {
        v = if v < 0.0 { -v } else { 2.0 * len - v };
        flipped = !flipped;
    }
    (v, flipped)
}

/// Moves `pose` a distance `dist` along its heading with specular reflection
/// at the walls of `[0, arena]²`.
pub fn translate(pose: Pose, dist: f64, arena: f64) -> Pose {
    let (sin, cos) = pose.heading.sin_cos();
    translate_along(pose, (cos, sin), dist, arena)
}

/// [`translate`] with the unit heading vector supplied by the caller.
fn translate_along(pose: Pose, (ux, uy): (f64, f64), dist: f64, arena: f64) -> Pose {
    let (x, flip_x) = fold(pose.x + dist * ux, arena);
    let (y, flip_y) = fold(pose.y + dist * uy, arena);
    let mut heading = pose.heading;
    if flip_x {
        heading = PI - heading;
    }
    if flip_y {
        heading = -heading;
    }
    Pose {
        x,
        y,
        heading: if flip_x || flip_y {
            wrap_angle(heading)
        } else {
            heading
        },
    }
}

/// A robot pose plus the distance left on its current leg.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Walker {
    pose: Pose,
    leg_remaining: f64,
    /// Cached `(cos, sin)` of the heading.
    dir: (f64, f64),
}

impl Walker {
    /// A walker that draws a fresh leg on its first tick.
    pub fn new(pose: Pose) -> Self {
        let (sin, cos) = pose.heading.sin_cos();
        Walker {
            pose,
            leg_remaining: 0.0,
            dir: (cos, sin),
        }
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    /// Distance left before the next heading/length draw.
    pub fn leg_remaining(&self) -> f64 {
        self.leg_remaining
    }

    fn new_leg<R: Rng + ?Sized>(
        &mut self,
        policy: &WalkPolicy,
        arena: f64,
        rng: &mut R,
    ) -> Result<()> {
        let diag = arena * SQRT_2;
        match *policy {
            WalkPolicy::Crw { rho, leg } => {
                self.pose.heading = wrap_angle(self.pose.heading + sample_turn_crw(rho, rng)?);
                self.leg_remaining = leg;
            }
            WalkPolicy::Levy {
                alpha,
                min_step,
                max_step,
            } => {
                self.pose.heading = wrap_angle(rng.random_range(-PI..PI));
                self.leg_remaining =
                    sample_step_levy(alpha, min_step, max_step.unwrap_or(diag), rng)?;
            }
            WalkPolicy::Hybrid {
                rho,
                alpha,
                min_step,
                max_step,
            } => {
                self.pose.heading = wrap_angle(self.pose.heading + sample_turn_crw(rho, rng)?);
                self.leg_remaining =
                    sample_step_levy(alpha, min_step, max_step.unwrap_or(diag), rng)?;
            }
        }
        Ok(())
    }

    /// Advances one tick of length `dt` at `speed`.
    pub fn advance<R: Rng + ?Sized>(
        &mut self,
        policy: &WalkPolicy,
        speed: f64,
        dt: f64,
        arena: f64,
        rng: &mut R,
    ) -> Result<()> {
        let mut turned = false;
        if self.leg_remaining <= 0.0 {
            let before = self.pose.heading;
            self.new_leg(policy, arena, rng)?;
            turned = self.pose.heading != before;
        }
        if turned {
            let (sin, cos) = self.pose.heading.sin_cos();
            self.dir = (cos, sin);
        }
        let dist = speed * dt;
        let heading = self.pose.heading;
        self.pose = translate_along(self.pose, self.dir, dist, arena);
        if self.pose.heading != heading {
            let (sin, cos) = self.pose.heading.sin_cos();
            self.dir = (cos, sin);
        }
        self.leg_remaining -= dist;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rho_one_never_turns() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert_eq!(sample_turn_crw(1.0, &mut rng).unwrap(), 0.0);
        }
    }

    #[test]
    fn rho_zero_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut draws: Vec<f64> = (0..100_000)
            .map(|_| sample_turn_crw(0.0, &mut rng).unwrap())
            .collect();
        draws.sort_by(f64::total_cmp);
        let n = draws.len() as f64;
        let ks = draws
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let cdf = (a + PI) / TAU;
                (cdf - i as f64 / n)
                    .abs()
                    .max(((i + 1) as f64 / n - cdf).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.02, "KS statistic {ks}");
        assert!(draws.iter().all(|&a| (-PI..PI).contains(&a)));
    }

    #[test]
    fn wrapped_cauchy_resultant_length_is_rho() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (mut c, mut s) = (0.0, 0.0);
        let n = 100_000;
        for _ in 0..n {
            let a = sample_turn_crw(0.7, &mut rng).unwrap();
            c += a.cos();
            s += a.sin();
        }
        let r = (c * c + s * s).sqrt() / n as f64;
        assert!((r - 0.7).abs() < 0.01, "resultant length {r}");
    }

    #[test]
    fn rho_out_of_range_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_turn_crw(1.5, &mut rng),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            sample_turn_crw(-0.1, &mut rng),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn levy_endpoints() {
        assert_eq!(levy_quantile(0.3, 2.0, 1.0, 1.0), 1.0);
        assert!((levy_quantile(0.0, 2.0, 1.0, 100.0) - 1.0).abs() < 1e-12);
        assert!((levy_quantile(1.0, 2.0, 1.0, 100.0) - 100.0).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(sample_step_levy(1.7, 1.0, 1.0, &mut rng).unwrap(), 1.0);
        assert!(sample_step_levy(1.0, 1.0, 10.0, &mut rng).is_err());
        assert!(sample_step_levy(2.0, 0.0, 10.0, &mut rng).is_err());
    }

    /// Truncated-Pareto mean by composite Simpson quadrature of s·f(s).
    fn truncated_pareto_mean(alpha: f64, lo: f64, hi: f64) -> f64 {
        let n = 200_000;
        // integrate in log-space: s = e^u, ds = e^u du
        let (a, b) = (lo.ln(), hi.ln());
        let h = (b - a) / n as f64;
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let mut acc = f(a) + f(b);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(a + i as f64 * h);
            }
            acc * h / 3.0
        };
        let num = simpson(&|u: f64| u.exp().powf(1.0 - alpha) * u.exp());
        let den = simpson(&|u: f64| u.exp().powf(-alpha) * u.exp());
        num / den
    }

    #[test]
    fn levy_sample_mean_matches_truncated_pareto() {
        let expected = truncated_pareto_mean(2.0, 1.0, 100.0);
        assert!((expected - 100f64.ln() / 0.99).abs() < 1e-6);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let draws: Vec<f64> = (0..100_000)
            .map(|_| sample_step_levy(2.0, 1.0, 100.0, &mut rng).unwrap())
            .collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let se = (var / n).sqrt();
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {mean} vs {expected} (se {se})"
        );
        assert!(draws.iter().all(|&d| (1.0..=100.0).contains(&d)));
    }

    #[test]
    fn straight_interior_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut w = Walker::new(Pose {
            x: 50.0,
            y: 50.0,
            heading: 0.0,
        });
        w.advance(&WalkPolicy::crw(1.0), 0.05, 1.0, 200.0, &mut rng)
            .unwrap();
        assert!((w.pose().x - 50.05).abs() < 1e-12);
        assert_eq!(w.pose().y, 50.0);
        assert_eq!(w.pose().heading, 0.0);
    }

    #[test]
    fn wall_reflection() {
        let l = 200.0;
        let p = translate(
            Pose {
                x: l - 0.01,
                y: 50.0,
                heading: 0.0,
            },
            0.05,
            l,
        );
        assert!((p.x - (l - 0.04)).abs() < 1e-9);
        assert_eq!(p.y, 50.0);
        // π and −π are the same direction; [−π, π) stores it as −π.
        assert!((p.heading.cos() + 1.0).abs() < 1e-12);
        assert!((-PI..PI).contains(&p.heading));
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(
            "crw:0.7".parse::<WalkPolicy>().unwrap(),
            WalkPolicy::crw(0.7)
        );
        assert_eq!(
            "lw:2.0".parse::<WalkPolicy>().unwrap(),
            WalkPolicy::levy(2.0)
        );
        assert_eq!(
            "hybrid:0.6,1.8".parse::<WalkPolicy>().unwrap(),
            WalkPolicy::hybrid(0.6, 1.8)
        );
        assert_eq!(WalkPolicy::hybrid(0.6, 1.8).to_string(), "hybrid:0.6,1.8");
        assert!("walk:1".parse::<WalkPolicy>().is_err());
        assert!("crw:x".parse::<WalkPolicy>().is_err());
    }

    #[test]
    fn validate_domains() {
        assert!(WalkPolicy::crw(0.7).validate(200.0).is_ok());
        assert!(WalkPolicy::crw(1.2).validate(200.0).is_err());
        assert!(WalkPolicy::levy(1.0).validate(200.0).is_err());
        assert!(WalkPolicy::Levy {
            alpha: 2.0,
            min_step: 1.0,
            max_step: Some(500.0)
        }
        .validate(200.0)
        .is_err());
    }
}
