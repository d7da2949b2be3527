use std::fs;
use std::path::Path;

use swarmdiff::report::emit_reports;
use swarmdiff::sim::HOUR;
use swarmdiff::stats;
use swarmdiff::sweep::{run_sweep, SweepAxis, SweepPlan};
use swarmdiff::{SimConfig, WalkPolicy};

fn tiny_plan() -> SweepPlan {
    SweepPlan {
        axis: SweepAxis::C(vec![8.0, 16.0]),
        base: SimConfig {
            n: 6,
            arena: 50.0,
            duration: 3.0 * HOUR,
            msg_period: HOUR,
            msg_window: 2.0 * HOUR,
            ..SimConfig::default()
        },
        reps: 2,
        seed_base: 42,
    }
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, fs::read(&p).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn tiny_sweep_matches_golden_files() {
    let result = run_sweep(&tiny_plan()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report");
    emit_reports(&[result], Vec::new(), &out).unwrap();

    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for name in [
        "micro.csv",
        "fits.csv",
        "summary.json",
        "curves/C=8_rep0_msg0.csv",
    ] {
        let actual = fs::read_to_string(out.join(name)).unwrap();
        let file = golden.join(name.replace('/', "__"));
        if std::env::var_os("SWARMDIFF_BLESS").is_some() {
            fs::write(&file, &actual).unwrap();
        }
        let expected =
            fs::read_to_string(&file).unwrap_or_else(|e| panic!("{}: {e}", file.display()));
        assert_eq!(actual, expected, "{name} drifted from golden copy");
    }
}

#[test]
fn same_plan_twice_and_reemission_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    emit_reports(&[run_sweep(&tiny_plan()).unwrap()], Vec::new(), &a).unwrap();
    let second = run_sweep(&tiny_plan()).unwrap();
    emit_reports(std::slice::from_ref(&second), Vec::new(), &b).unwrap();
    let first_tree = read_tree(&a);
    assert_eq!(first_tree, read_tree(&b));
    assert!(first_tree.len() > 3);

    // Re-emission over an existing directory, including a stray file.
    fs::write(b.join("stale.txt"), "old").unwrap();
    emit_reports(&[second], Vec::new(), &b).unwrap();
    assert_eq!(first_tree, read_tree(&b));
}

#[test]
fn single_value_single_rep_runs_once() {
    let plan = SweepPlan {
        axis: SweepAxis::N(vec![20]),
        reps: 1,
        ..tiny_plan()
    };
    let r = run_sweep(&plan).unwrap();
    assert_eq!(r.points.len(), 1);
    assert_eq!(r.points[0].runs.len(), 1);
    assert_eq!(r.points[0].runs[0].seed, 42);
}

#[test]
fn default_config_encounter_time_near_corrected_prediction() {
    let plan = SweepPlan {
        axis: SweepAxis::N(vec![20]),
        base: SimConfig::default(),
        reps: 5,
        seed_base: 7,
    };
    let r = run_sweep(&plan).unwrap();
    let beta = r.beta.as_ref().unwrap().beta;
    let p = &r.points[0];
    let pooled = stats::mean(&p.tau_empirical()).unwrap();
    let predicted = beta * p.tau_ideal;
    assert!(
        (pooled / predicted - 1.0).abs() <= 0.3,
        "pooled {pooled} vs {predicted}"
    );
}

#[test]
fn levy_heavy_tails_propagate_faster_than_crw() {
    let plan = SweepPlan {
        axis: SweepAxis::Walk(vec![WalkPolicy::levy(1.4), WalkPolicy::crw(0.7)]),
        base: SimConfig::default(),
        reps: 5,
        seed_base: 300,
    };
    let r = run_sweep(&plan).unwrap();
    let lw = r.points[0].summary.median_full_propagation.unwrap();
    let crw = r.points[1].summary.median_full_propagation.unwrap();
    assert!(lw < crw, "levy {lw} vs crw {crw}");
}
