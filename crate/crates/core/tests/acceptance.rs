//! Runs the eight acceptance criteria and prints one line per criterion.
//! Exits non-zero when any hard check fails.

use std::process::ExitCode;

use witsenhausen::{verify::run_suite, Suite, VerifyOptions};

fn main() -> ExitCode {
    let opts = VerifyOptions::default();
    let mut failed = 0;
    for (i, suite) in Suite::EACH.into_iter().enumerate() {
        let reports = match run_suite(suite, &opts) {
            Ok(r) => r,
            Err(e) => {
                println!("criterion {} {}: FAIL (error: {e})", i + 1, suite.name());
                failed += 1;
                continue;
            }
        };
        let report = &reports[0];
        let verdict = if report.passed() { "PASS" } else { "FAIL" };
        println!("criterion {} {}: {verdict} ({:.1} s)", i + 1, suite.name(), report.seconds);
        for c in &report.checks {
            let tag = match (c.passed, c.soft) {
                (true, _) => "ok",
                (false, true) => "warn",
                (false, false) => "FAIL",
            };
            println!("    [{tag}] {}: {}", c.name, c.detail);
        }
        if !report.passed() {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", Suite::EACH.len() - failed, Suite::EACH.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
