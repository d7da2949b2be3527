//! Encounter-driven information diffusion in robot swarms.
//!
//! Robots random-walk in a square arena and exchange messages only when they
//! come within communication range of each other. The crate provides
//!
//! * [`mobility`] and [`sim`]: the swarm simulator producing encounter logs and
//!   per-message diffusion curves,
//! * [`micro`]: kinetic-theory mean free time and its empirical estimate,
//! * [`dynamics`]: logistic, Gompertz and blended diffusion laws,
//! * [`master`]: exact jump-process simulation of the informed count,
//! * [`fit`]: bounded simplex fitting of the blended model to curves,
//! * [`sweep`] and [`report`]: parameter sweeps and their CSV/JSON reports.

// `!(x > 0.0)` is used throughout to reject NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod csvio;
pub mod dynamics;
pub mod error;
pub mod fit;
pub mod master;
pub mod micro;
pub mod mobility;
pub mod report;
pub mod sim;
pub mod stats;
pub mod sweep;

pub use dynamics::MacroParams;
pub use error::{Error, Result};
pub use fit::{fit_mdl, FitContext, FitResult};
pub use micro::{BetaFit, MicroEstimate};
pub use mobility::{Pose, WalkPolicy};
pub use sim::{DiffusionCurve, EncounterEvent, SimConfig, SimOutput};
pub use sweep::{SweepAxis, SweepPlan, SweepResult};
