//! Sweep reports on disk.
//!
//! ```text
//! <out>/micro.csv      sweep_value,tau_ideal,tau_emp,iqr_lo,iqr_hi   (one row per run)
//! <out>/fits.csv       config_id,msg_id,lambda,tau,t0,rmse,converged
//! <out>/curves/<config_id>_msg<k>.csv        msg_id,t,informed
//! <out>/curves/<config_id>_msg<k>_model.csv  t,I_model
//! <out>/summary.json
//! ```
//!
//! `config_id` is `<variable>=<label>_rep<i>`. The directory is assembled in a
//! temporary sibling and renamed into place, so a failed emission leaves any
//! previous report untouched.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::csvio;
use crate::dynamics::{linspace, mdl_blend};
use crate::error::{Error, Result};
use crate::fit::{self, Trend};
use crate::micro::BetaFit;
use crate::sweep::{PointSummary, SweepResult};

/// Outcome of one acceptance check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointReport {
    pub label: String,
    pub value: f64,
    pub tau_ideal: f64,
    pub summary: PointSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub variable: String,
    pub reps: usize,
    pub seed_base: u64,
    pub failed_runs: usize,
    pub beta: Option<BetaFit>,
    pub lambda_trend: Option<Trend>,
    pub points: Vec<PointReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Summary {
    pub sweeps: Vec<SweepSummary>,
    /// β regressed over every run of every sweep.
    pub pooled_beta: Option<BetaFit>,
    pub acceptance: Vec<Verdict>,
}

impl Summary {
    pub fn from_sweeps(sweeps: &[SweepResult], acceptance: Vec<Verdict>) -> Self {
        let pooled: Vec<(f64, f64)> = sweeps.iter().flat_map(|s| s.beta_points()).collect();
        Summary {
            sweeps: sweeps.iter().map(summarize_sweep).collect(),
            pooled_beta: crate::micro::fit_beta(&pooled).ok(),
            acceptance,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.acceptance.iter().all(|v| v.passed)
    }
}

pub fn summarize_sweep(s: &SweepResult) -> SweepSummary {
    let trend_input: Vec<(f64, Vec<fit::FitResult>)> =
        s.points.iter().map(|p| (p.value, p.fits())).collect();
    SweepSummary {
        variable: s.variable.clone(),
        reps: s.reps,
        seed_base: s.seed_base,
        failed_runs: s.failed_runs,
        beta: s.beta.clone(),
        lambda_trend: fit::lambda_trend(&trend_input).ok(),
        points: s
            .points
            .iter()
            .map(|p| PointReport {
                label: p.label.clone(),
                value: p.value,
                tau_ideal: p.tau_ideal,
                summary: p.summary.clone(),
            })
            .collect(),
    }
}

fn fmt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        String::new()
    }
}

fn write_sweep(dir: &Path, results: &[SweepResult]) -> Result<()> {
    let mut micro = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("micro.csv"))?));
    micro.write_record(["sweep_value", "tau_ideal", "tau_emp", "iqr_lo", "iqr_hi"])?;
    let mut fits = csv::Writer::from_writer(BufWriter::new(File::create(dir.join("fits.csv"))?));
    fits.write_record([
        "config_id",
        "msg_id",
        "lambda",
        "tau",
        "t0",
        "rmse",
        "converged",
    ])?;
    let curves_dir = dir.join("curves");
    fs::create_dir_all(&curves_dir)?;

    for sweep in results {
        for point in &sweep.points {
            for run in &point.runs {
                let config_id = format!("{}={}_rep{}", sweep.variable, point.label, run.rep);
                let (emp, lo, hi) = run.micro.map_or((f64::NAN, f64::NAN, f64::NAN), |m| {
                    (m.tau_empirical, m.iqr.0, m.iqr.1)
                });
                micro.write_record([
                    point.label.clone(),
                    fmt(point.tau_ideal),
                    fmt(emp),
                    fmt(lo),
                    fmt(hi),
                ])?;

                for rec in &run.curves {
                    let stem = format!(
                        "{}_msg{}",
                        config_id.replace([':', ','], "-"),
                        rec.curve.msg_id
                    );
                    let file =
                        BufWriter::new(File::create(curves_dir.join(format!("{stem}.csv")))?);
                    csvio::write_curves(file, std::slice::from_ref(&rec.curve))?;
                    let Some(f) = rec.fit else { continue };
                    fits.write_record([
                        config_id.clone(),
                        rec.curve.msg_id.to_string(),
                        fmt(f.params.lambda),
                        fmt(f.params.tau),
                        fmt(f.params.t0),
                        fmt(f.rmse),
                        f.converged.to_string(),
                    ])?;
                    let grid = linspace(rec.curve.t0, rec.curve.t_end, 200);
                    let model: Vec<f64> = grid.iter().map(|&t| mdl_blend(t, &f.params)).collect();
                    let file =
                        BufWriter::new(File::create(curves_dir.join(format!("{stem}_model.csv")))?);
                    csvio::write_model_curve(file, &grid, &model)?;
                }
            }
        }
    }
    micro.flush()?;
    fits.flush()?;
    Ok(())
}

/// Writes the full report for `results` (plus optional acceptance verdicts)
/// into `out_dir`, replacing any previous contents.
pub fn emit_reports(
    results: &[SweepResult],
    acceptance: Vec<Verdict>,
    out_dir: &Path,
) -> Result<Summary> {
    let summary = Summary::from_sweeps(results, acceptance);
    let parent = match out_dir.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::env::current_dir()?,
    };
    fs::create_dir_all(&parent)?;
    let staging = tempfile::Builder::new()
        .prefix(".swarmdiff-report-")
        .tempdir_in(&parent)?;

    write_sweep(staging.path(), results)?;
    let json = serde_json::to_string_pretty(&summary)?;
    fs::write(staging.path().join("summary.json"), json + "\n")?;

    if out_dir.exists() {
        if !out_dir.is_dir() {
            return Err(Error::Input(format!(
                "{} exists and is not a directory",
                out_dir.display()
            )));
        }
        fs::remove_dir_all(out_dir)?;
    }
    let staged = staging.keep();
    fs::rename(&staged, out_dir)?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_results_write_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("report");
        let summary = emit_reports(&[], Vec::new(), &out).unwrap();
        assert!(summary.sweeps.is_empty());
        assert_eq!(
            fs::read_to_string(out.join("micro.csv")).unwrap(),
            "sweep_value,tau_ideal,tau_emp,iqr_lo,iqr_hi\n"
        );
        assert_eq!(
            fs::read_to_string(out.join("fits.csv")).unwrap(),
            "config_id,msg_id,lambda,tau,t0,rmse,converged\n"
        );
        let json: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
        assert!(json["acceptance"].as_array().unwrap().is_empty());
    }

    #[test]
    fn unwritable_target_leaves_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        assert!(emit_reports(&[], Vec::new(), &blocker).is_err());
        assert_eq!(fs::read_to_string(&blocker).unwrap(), "x");
        let leftovers = fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(leftovers, 1);
    }
}
