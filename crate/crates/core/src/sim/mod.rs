//! Swarm simulation: kinematic robots, range-based encounters and lossless
//! message exchange on contact.

mod grid;

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobility::{Pose, WalkPolicy, Walker};

pub use grid::{detect_encounters, detect_encounters_brute, Grid, Pair};

/// One hour in seconds.
pub const HOUR: f64 = 3600.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Number of robots.
    pub n: usize,
    /// Communication range, meters.
    pub comm_range: f64,
    /// Arena side, meters.
    pub arena: f64,
    /// Speed, m/s.
    pub speed: f64,
    pub dt: f64,
    pub duration: f64,
    pub walk: WalkPolicy,
    pub seed: u64,
    pub msg_source: usize,
    pub msg_period: f64,
    pub msg_window: f64,
    #[serde(default)]
    pub record_trajectory: bool,
}

impl Default for SimConfig {
    /// Standard defaults at desk scale: 20 simulated hours, a new message
    /// every hour for the first 5 hours.
    fn default() -> Self {
        SimConfig {
            n: 20,
            comm_range: 10.0,
            arena: 200.0,
            speed: 0.05,
            dt: 1.0,
            duration: 20.0 * HOUR,
            walk: WalkPolicy::crw(0.7),
            seed: 0,
            msg_source: 0,
            msg_period: HOUR,
            msg_window: 5.0 * HOUR,
            record_trajectory: false,
        }
    }
}

impl SimConfig {
    /// Full-length schedule: 100 simulated hours, messages every hour for 50 hours.
    pub fn full_scale() -> Self {
        SimConfig {
            duration: 100.0 * HOUR,
            msg_window: 50.0 * HOUR,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n < 2 {
            return bad(format!("need at least 2 robots, got {}", self.n));
        }
        if !(self.arena > 0.0 && self.arena.is_finite()) {
            return bad(format!("arena side must be positive, got {}", self.arena));
        }
        if !(self.comm_range > 0.0 && self.comm_range.is_finite()) {
            return bad(format!(
                "communication range must be positive, got {}",
                self.comm_range
            ));
        }
        if !(self.speed >= 0.0 && self.speed.is_finite()) {
            return bad(format!("speed must be non-negative, got {}", self.speed));
        }
        if !(self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.msg_period > 0.0) {
            return bad(format!(
                "message period must be positive, got {}",
                self.msg_period
            ));
        }
        if !(self.msg_window >= 0.0 && self.duration >= self.msg_window) {
            return bad(format!(
                "need 0 <= msg_window <= duration, got window {} and duration {}",
                self.msg_window, self.duration
            ));
        }
        if self.msg_source >= self.n {
            return bad(format!(
                "message source {} out of range for {} robots",
                self.msg_source, self.n
            ));
        }
        self.walk
            .validate(self.arena)
            .map_err(|e| Error::Config(e.to_string()))
    }

    /// Number of messages emitted: one every `msg_period` while `t < msg_window`,
    /// and never fewer than one.
    pub fn message_count(&self) -> usize {
        ((self.msg_window / self.msg_period).ceil() as usize).max(1)
    }

    pub fn ticks(&self) -> u64 {
        (self.duration / self.dt).round() as u64
    }

    /// Time a robot needs to cross the communication disk, `2C/V`.
    pub fn crossing_time(&self) -> f64 {
        if self.speed > 0.0 {
            2.0 * self.comm_range / self.speed
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Rising,
    Falling,
}

impl EdgeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EdgeKind::Rising => "rising",
            EdgeKind::Falling => "falling",
        }
    }
}

/// A pair entering (`Rising`) or leaving (`Falling`) communication range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncounterEvent {
    pub t: f64,
    pub a: u32,
    pub b: u32,
    pub kind: EdgeKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub t: f64,
    pub informed: usize,
}

/// Number of robots holding one message over time. A sample is recorded at
/// emission and whenever the count changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffusionCurve {
    pub msg_id: usize,
    /// Emission time.
    pub t0: f64,
    /// End of observation; the count is constant from the last sample up to here.
    pub t_end: f64,
    pub robots: usize,
    pub samples: Vec<CurveSample>,
}

impl DiffusionCurve {
    /// Informed count at time `t` (step function, right-continuous).
    pub fn informed_at(&self, t: f64) -> usize {
        let idx = self.samples.partition_point(|s| s.t <= t);
        if idx == 0 {
            0
        } else {
            self.samples[idx - 1].informed
        }
    }

    pub fn fraction_at(&self, t: f64) -> f64 {
        self.informed_at(t) as f64 / self.robots as f64
    }

    pub fn final_informed(&self) -> usize {
        self.samples.last().map_or(0, |s| s.informed)
    }

    pub fn fully_propagated(&self) -> bool {
        self.final_informed() >= self.robots
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub robot: u32,
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOutput {
    pub config: SimConfig,
    pub encounters: Vec<EncounterEvent>,
    pub curves: Vec<DiffusionCurve>,
    pub trajectory: Option<Vec<TrajectoryRow>>,
}

/// Per-robot message sets as a flat bitset, `words` u64 per robot.
#[derive(Debug, Clone)]
struct Inbox {
    words: usize,
    bits: Vec<u64>,
}

impl Inbox {
    fn new(robots: usize, messages: usize) -> Self {
        let words = messages.div_ceil(64).max(1);
        Inbox {
            words,
            bits: vec![0; robots * words],
        }
    }

    fn insert(&mut self, r: usize, msg: usize) {
        self.bits[r * self.words + msg / 64] |= 1u64 << (msg % 64);
    }

    fn contains(&self, r: usize, msg: usize) -> bool {
        self.bits[r * self.words + msg / 64] & (1u64 << (msg % 64)) != 0
    }
}

/// Complete simulation state; advance it with [`World::step`].
#[derive(Debug, Clone)]
pub struct World {
    config: SimConfig,
    rng: ChaCha8Rng,
    walkers: Vec<Walker>,
    tick: u64,
    positions: Vec<(f64, f64)>,
    grid: Grid,
    in_range: Vec<Pair>,
    scratch: Vec<Pair>,
    inbox: Inbox,
    snapshot: Vec<u64>,
    counts: Vec<usize>,
    emitted: usize,
    encounters: Vec<EncounterEvent>,
    curves: Vec<DiffusionCurve>,
    trajectory: Option<Vec<TrajectoryRow>>,
}

impl World {
    /// Places robots uniformly at random with uniform headings, registers the
    /// contacts present at t = 0 and emits the first message.
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let poses: Vec<Pose> = (0..config.n)
            .map(|_| Pose {
                x: rng.random_range(0.0..=config.arena),
                y: rng.random_range(0.0..=config.arena),
                heading: rng.random_range(-PI..PI),
            })
            .collect();
        Self::assemble(config, rng, poses)
    }

    /// Starts from explicit poses instead of a random placement.
    pub fn with_poses(config: SimConfig, poses: Vec<Pose>) -> Result<Self> {
        config.validate()?;
        if poses.len() != config.n {
            return Err(Error::Config(format!(
                "expected {} poses, got {}",
                config.n,
                poses.len()
            )));
        }
        if poses
            .iter()
            .any(|p| !(0.0..=config.arena).contains(&p.x) || !(0.0..=config.arena).contains(&p.y))
        {
            return Err(Error::Config("pose outside the arena".into()));
        }
        let rng = ChaCha8Rng::seed_from_u64(config.seed);
        Self::assemble(config, rng, poses)
    }

    fn assemble(config: SimConfig, rng: ChaCha8Rng, poses: Vec<Pose>) -> Result<Self> {
        let messages = config.message_count();
        let mut world = World {
            rng,
            walkers: poses.into_iter().map(Walker::new).collect(),
            positions: Vec::with_capacity(config.n),
            grid: Grid::default(),
            in_range: Vec::new(),
            scratch: Vec::new(),
            inbox: Inbox::new(config.n, messages),
            snapshot: Vec::new(),
            counts: vec![0; messages],
            emitted: 0,
            encounters: Vec::new(),
            curves: Vec::with_capacity(messages),
            trajectory: config.record_trajectory.then(Vec::new),
            tick: 0,
            config,
        };
        world.resolve_contacts();
        Ok(world)
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn time(&self) -> f64 {
        self.tick as f64 * self.config.dt
    }

    pub fn poses(&self) -> impl Iterator<Item = Pose> + '_ {
        self.walkers.iter().map(Walker::pose)
    }

    /// Pairs currently in range, sorted.
    pub fn in_range(&self) -> &[Pair] {
        &self.in_range
    }

    pub fn curves(&self) -> &[DiffusionCurve] {
        &self.curves
    }

    pub fn encounters(&self) -> &[EncounterEvent] {
        &self.encounters
    }

    pub fn holds(&self, robot: usize, msg: usize) -> bool {
        self.inbox.contains(robot, msg)
    }

    /// Advances every robot by one tick, then updates contacts, emits due
    /// messages and exchanges message sets across in-range pairs.
    pub fn step(&mut self) -> Result<()> {
        let SimConfig {
            walk,
            speed,
            dt,
            arena,
            ..
        } = self.config;
        for w in &mut self.walkers {
            w.advance(&walk, speed, dt, arena, &mut self.rng)?;
        }
        self.tick += 1;
        self.resolve_contacts();
        Ok(())
    }

    fn resolve_contacts(&mut self) {
        let t = self.time();
        self.positions.clear();
        self.positions
            .extend(self.walkers.iter().map(|w| (w.pose().x, w.pose().y)));
        self.grid
            .pairs_within(&self.positions, self.config.comm_range, &mut self.scratch);
        diff_pairs(&self.in_range, &self.scratch, t, &mut self.encounters);
        std::mem::swap(&mut self.in_range, &mut self.scratch);

        self.emit_due(t);
        self.exchange(t);

        if let Some(rows) = self.trajectory.as_mut() {
            rows.extend(self.walkers.iter().enumerate().map(|(r, w)| {
                let p = w.pose();
                TrajectoryRow {
                    t,
                    robot: r as u32,
                    x: p.x,
                    y: p.y,
                    heading: p.heading,
                }
            }));
        }
    }

    fn emit_due(&mut self, t: f64) {
        let eps = 1e-9 * self.config.dt;
        while self.emitted < self.counts.len()
            && self.emitted as f64 * self.config.msg_period <= t + eps
        {
            let msg = self.emitted;
            self.emitted += 1;
            let src = self.config.msg_source;
            self.inbox.insert(src, msg);
            self.counts[msg] = 1;
            self.curves.push(DiffusionCurve {
                msg_id: msg,
                t0: t,
                t_end: t,
                robots: self.config.n,
                samples: vec![CurveSample { t, informed: 1 }],
            });
        }
    }

    /// Same-tick union of message sets over in-range pairs, computed from the
    /// sets held at the start of the exchange (no transitive closure).
    fn exchange(&mut self, t: f64) {
        for c in &mut self.curves {
            c.t_end = t;
        }
        if self.in_range.is_empty() || self.emitted == 0 {
            return;
        }
        let words = self.inbox.words;
        self.snapshot.clear();
        self.snapshot.extend_from_slice(&self.inbox.bits);
        for &(a, b) in &self.in_range {
            let (a, b) = (a as usize, b as usize);
            for w in 0..words {
                let merged = self.snapshot[a * words + w] | self.snapshot[b * words + w];
                self.inbox.bits[a * words + w] |= merged;
                self.inbox.bits[b * words + w] |= merged;
            }
        }
        let mut changed = vec![false; self.counts.len()];
        for (i, (&now, &before)) in self.inbox.bits.iter().zip(&self.snapshot).enumerate() {
            let mut fresh = now & !before;
            while fresh != 0 {
                let bit = fresh.trailing_zeros() as usize;
                fresh &= fresh - 1;
                let msg = (i % words) * 64 + bit;
                self.counts[msg] += 1;
                changed[msg] = true;
            }
        }
        for (msg, _) in changed.iter().enumerate().filter(|(_, &c)| c) {
            self.curves[msg].samples.push(CurveSample {
                t,
                informed: self.counts[msg],
            });
        }
    }

    pub fn finish(self) -> SimOutput {
        SimOutput {
            config: self.config,
            encounters: self.encounters,
            curves: self.curves,
            trajectory: self.trajectory,
        }
    }
}

/// Appends rising/falling events for the difference between two sorted pair sets.
fn diff_pairs(before: &[Pair], after: &[Pair], t: f64, out: &mut Vec<EncounterEvent>) {
    let (mut i, mut j) = (0, 0);
    let mut emit = |(a, b): Pair, kind| out.push(EncounterEvent { t, a, b, kind });
    while i < before.len() || j < after.len() {
        match (before.get(i), after.get(j)) {
            (Some(p), Some(q)) if p == q => {
                i += 1;
                j += 1;
            }
            (Some(&p), Some(&q)) if p < q => {
                emit(p, EdgeKind::Falling);
                i += 1;
            }
            (Some(_), Some(&q)) => {
                emit(q, EdgeKind::Rising);
                j += 1;
            }
            (Some(&p), None) => {
                emit(p, EdgeKind::Falling);
                i += 1;
            }
            (None, Some(&q)) => {
                emit(q, EdgeKind::Rising);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
}

/// Runs a full simulation. Deterministic given the configuration (seed included).
pub fn run(config: &SimConfig) -> Result<SimOutput> {
    let mut world = World::new(config.clone())?;
    for _ in 0..config.ticks() {
        world.step()?;
    }
    Ok(world.finish())
}

/// Arena diagonal, the largest possible separation.
pub fn diagonal(arena: f64) -> f64 {
    arena * SQRT_2
}
