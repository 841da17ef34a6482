//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use bures_cli::verify::{run_criterion, CRITERIA};

fn main() {
    let mut failed = Vec::new();
    for &(number, _) in CRITERIA.iter() {
        let report = run_criterion(number, 1.0);
        println!("{}", report.summary());
        if !report.passed() {
            for check in report.checks.iter().filter(|c| !c.passed) {
                println!("      {}", check.line());
            }
            failed.push(number);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
    } else {
        println!("acceptance: {} of {} criteria failed: {failed:?}", failed.len(), CRITERIA.len());
        std::process::exit(1);
    }
}
