//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use swarmdiff::acceptance::{self, DeskSuite, SuiteOptions};
use swarmdiff::SimConfig;

fn main() -> ExitCode {
    // Behave like a libtest binary when cargo only asks for a listing.
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let opts = SuiteOptions::default();
    let suite = match DeskSuite::run(&SimConfig::default(), opts) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("acceptance sweeps failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let verdicts = match acceptance::evaluate(&suite, opts.seed_base) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("acceptance evaluation failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    for v in &verdicts {
        println!(
            "{} criterion {} ({}): {}",
            if v.passed { "PASS" } else { "FAIL" },
            v.id,
            v.name,
            v.detail
        );
    }
    let failed = verdicts.iter().filter(|v| !v.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed in {:.0} s",
        verdicts.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
