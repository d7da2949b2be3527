//! `swarmdiff`: encounter-driven information diffusion experiments.
//!
//! Exit status: 0 on success, 1 on any runtime or usage error, 2 when
//! `accept` ran to completion but at least one check failed.

mod config;

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_seconds, Overrides};
use swarmdiff::acceptance::{self, DeskSuite, SuiteOptions};
use swarmdiff::dynamics::{integrate_combined, linspace, mdl_blend, MacroParams};
use swarmdiff::master::{ensemble_mean, gillespie_ensemble, Regime};
use swarmdiff::micro::{estimate_tau_empirical, tau_ideal};
use swarmdiff::report::{emit_reports, summarize_sweep};
use swarmdiff::sweep::{run_sweep, SweepAxis, SweepPlan};
use swarmdiff::{csvio, sim, SimConfig, WalkPolicy};

#[derive(Parser, Debug)]
#[command(
    name = "swarmdiff",
    version,
    about = "Encounter-driven information diffusion in robot swarms"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Default)]
struct Common {
    /// Flat `key = value` settings file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Number of robots.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Communication range (m).
    #[arg(long, global = true)]
    c: Option<f64>,
    /// Arena side length (m).
    #[arg(long, global = true)]
    l: Option<f64>,
    /// Robot speed (m/s).
    #[arg(long, global = true)]
    v: Option<f64>,
    /// Walk policy: crw:RHO[,LEG], lw:ALPHA or hybrid:RHO,ALPHA.
    #[arg(long, global = true)]
    walk: Option<WalkPolicy>,
    /// Tick length (s).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Simulated time, seconds or hours with an `h` suffix.
    #[arg(long, global = true, value_parser = parse_seconds)]
    duration: Option<f64>,
    /// Interval between messages, seconds or hours with an `h` suffix.
    #[arg(long, global = true, value_parser = parse_seconds)]
    msg_period: Option<f64>,
    /// Messages are emitted during this initial span; defaults to 5 h, capped by the duration.
    #[arg(long, global = true, value_parser = parse_seconds)]
    msg_window: Option<f64>,
    /// Repetitions per sweep point.
    #[arg(long, global = true)]
    reps: Option<usize>,
    /// Seed (single run) or seed base (sweeps).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Full-length schedule: 100 h runs, 50 h of messages, 40 repetitions.
    #[arg(long, global = true)]
    paper_scale: bool,
    /// Worker threads for simulations and fits.
    #[arg(long, global = true, env = "SWARMDIFF_WORKERS")]
    workers: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<Overrides> {
        let file = match &self.config {
            Some(p) => Overrides::load(p)?,
            None => Overrides::default(),
        };
        let flags = Overrides {
            n: self.n,
            c: self.c,
            l: self.l,
            v: self.v,
            walk: self.walk,
            dt: self.dt,
            duration: self.duration,
            msg_period: self.msg_period,
            msg_window: self.msg_window,
            reps: self.reps,
            seed: self.seed,
            out: self.out.clone(),
            paper_scale: self.paper_scale.then_some(true),
        };
        Ok(file.merge(flags))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write encounters.csv and curves.csv.
    Simulate {
        /// Also write per-tick poses to trajectory.csv.
        #[arg(long)]
        trajectory: bool,
    },
    /// One-factor parameter sweep with fits and reports.
    Sweep {
        #[arg(long, value_enum)]
        vary: Vary,
        /// Comma-separated values (walk policies for `walk`); defaults to the standard table.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<String>>,
    },
    /// Encounter-time validation across swarm sizes; prints the β regression.
    Validate,
    /// Evaluate the macroscopic model on a time grid.
    Model {
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        /// Grid end, in multiples of τ after t0.
        #[arg(long, default_value_t = 10.0)]
        span: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Method::Blend)]
        method: Method,
    },
    /// Gillespie ensemble mean of the informed fraction.
    Ensemble {
        /// logistic, gompertz or blend:LAMBDA.
        #[arg(long, default_value = "logistic")]
        regime: Regime,
        #[arg(long)]
        tau: f64,
        #[arg(long, default_value_t = 2000)]
        runs: usize,
        #[arg(long, default_value_t = 10.0)]
        span: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
    },
    /// Full acceptance suite; writes every sweep plus verdicts to the output directory.
    Accept,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Vary {
    #[value(name = "N", alias = "n")]
    N,
    #[value(name = "C", alias = "c")]
    C,
    #[value(name = "L", alias = "l")]
    L,
    Walk,
    Crw,
    Levy,
    Hybrid,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum Method {
    Blend,
    Ode,
}

fn parse_list<T: std::str::FromStr>(values: &[String]) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    values
        .iter()
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|e| anyhow::anyhow!("bad sweep value `{v}`: {e}"))
        })
        .collect()
}

fn sweep_axis(vary: Vary, values: Option<&[String]>) -> Result<SweepAxis> {
    Ok(match (vary, values) {
        (Vary::N, None) => SweepAxis::table_n(),
        (Vary::C, None) => SweepAxis::table_c(),
        (Vary::L, None) => SweepAxis::table_l(),
        (Vary::Crw | Vary::Walk, None) => SweepAxis::table_crw(),
        (Vary::Levy, None) => SweepAxis::table_levy(),
        (Vary::Hybrid, None) => SweepAxis::table_hybrid(),
        (Vary::N, Some(v)) => SweepAxis::N(parse_list(v)?),
        (Vary::C, Some(v)) => SweepAxis::C(parse_list(v)?),
        (Vary::L, Some(v)) => SweepAxis::L(parse_list(v)?),
        (Vary::Walk, Some(v)) => SweepAxis::Walk(parse_list(v)?),
        (Vary::Crw, Some(v)) => SweepAxis::Walk(
            parse_list::<f64>(v)?
                .into_iter()
                .map(WalkPolicy::crw)
                .collect(),
        ),
        (Vary::Levy, Some(v)) => SweepAxis::Walk(
            parse_list::<f64>(v)?
                .into_iter()
                .map(WalkPolicy::levy)
                .collect(),
        ),
        (Vary::Hybrid, Some(_)) => {
            bail!("hybrid sweeps take walk policies: use --vary walk --values hybrid:R,A,...")
        }
    })
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut stdout = io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

fn simulate(cfg: SimConfig, out: &Path) -> Result<()> {
    let result = sim::run(&cfg)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    csvio::write_encounters(create(out, "encounters.csv")?, &result.encounters)?;
    csvio::write_curves(create(out, "curves.csv")?, &result.curves)?;
    if let Some(rows) = &result.trajectory {
        csvio::write_trajectory(create(out, "trajectory.csv")?, rows)?;
    }
    let ideal = tau_ideal(cfg.arena, cfg.comm_range, cfg.n, cfg.speed)?;
    let micro = estimate_tau_empirical(&result.encounters, cfg.n, cfg.crossing_time(), ideal).ok();
    print_json(&serde_json::json!({
        "config": cfg,
        "encounters": result.encounters.len(),
        "messages": result.curves.len(),
        "fully_propagated": result.curves.iter().filter(|c| c.fully_propagated()).count(),
        "tau_ideal": ideal,
        "micro": micro,
    }))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let settings = cli.common.resolve()?;
    if let Some(w) = cli.common.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("configuring worker pool")?;
    }
    let base = settings.sim_config();
    let out = settings.out_dir();

    match cli.command {
        Command::Simulate { trajectory } => {
            simulate(
                SimConfig {
                    record_trajectory: trajectory,
                    ..base
                },
                &out,
            )?;
        }
        Command::Sweep { vary, values } => {
            let plan = SweepPlan {
                axis: sweep_axis(vary, values.as_deref())?,
                base,
                reps: settings.reps(),
                seed_base: settings.seed.unwrap_or(0),
            };
            let result = run_sweep(&plan)?;
            let summary = emit_reports(&[result], Vec::new(), &out)?;
            print_json(&serde_json::to_value(&summary.sweeps[0])?)?;
        }
        Command::Validate => {
            let plan = SweepPlan {
                axis: SweepAxis::N(acceptance::N_VALUES.to_vec()),
                base,
                reps: settings.reps(),
                seed_base: settings.seed.unwrap_or(0),
            };
            let result = run_sweep(&plan)?;
            let summary = summarize_sweep(&result);
            emit_reports(&[result], Vec::new(), &out)?;
            let points: Vec<_> = summary
                .points
                .iter()
                .map(|p| {
                    serde_json::json!({
                        "n": p.label,
                        "tau_ideal": p.tau_ideal,
                        "median_tau_empirical": p.summary.median_tau_empirical,
                    })
                })
                .collect();
            print_json(&serde_json::json!({ "beta": summary.beta, "points": points }))?;
        }
        Command::Model {
            lambda,
            tau,
            t0,
            span,
            points,
            method,
        } => {
            let p = MacroParams::for_swarm(base.n, lambda, tau, t0);
            p.validate()?;
            let grid = linspace(t0, t0 + span * tau, points);
            let values = match method {
                Method::Blend => grid.iter().map(|&t| mdl_blend(t, &p)).collect(),
                Method::Ode => integrate_combined(&p, &grid)?,
            };
            csvio::write_model_curve(io::stdout().lock(), &grid, &values)?;
        }
        Command::Ensemble {
            regime,
            tau,
            runs,
            span,
            points,
        } => {
            let seed = settings.seed.unwrap_or(0);
            let trajectories = gillespie_ensemble(base.n, tau, regime, runs, seed)?;
            let grid = linspace(0.0, span * tau, points);
            csvio::write_ensemble(io::stdout().lock(), &ensemble_mean(&trajectories, &grid)?)?;
        }
        Command::Accept => {
            let opts = SuiteOptions {
                reps: settings.reps(),
                seed_base: settings.seed.unwrap_or(SuiteOptions::default().seed_base),
            };
            let suite = DeskSuite::run(&base, opts)?;
            let verdicts = acceptance::evaluate(&suite, opts.seed_base)?;
            let sweeps: Vec<_> = suite.sweeps().into_iter().cloned().collect();
            let summary = emit_reports(&sweeps, verdicts, &out)?;
            for v in &summary.acceptance {
                println!(
                    "{} {} {}: {}",
                    if v.passed { "PASS" } else { "FAIL" },
                    v.id,
                    v.name,
                    v.detail
                );
            }
            if !summary.all_passed() {
                return Ok(ExitCode::from(2));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
