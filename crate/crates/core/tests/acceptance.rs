//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Set `ACCEPTANCE_ONLY=3,7` to run a subset.

use std::process::ExitCode;

use negdep_qmc::suite::{run_criterion, SuiteConfig, CRITERIA};

fn main() -> ExitCode {
    let ids: Vec<u8> = match std::env::var("ACCEPTANCE_ONLY") {
        Ok(list) => list
            .split(',')
            .map(|s| s.trim().parse().expect("ACCEPTANCE_ONLY takes comma-separated ids"))
            .collect(),
        Err(_) => (1..=CRITERIA).collect(),
    };
    let cfg = SuiteConfig::default();
    println!("acceptance suite, seed {}", cfg.seed);
    let mut failed = 0;
    for id in ids {
        match run_criterion(id, &cfg) {
            Ok(outcome) => {
                println!("{}", outcome.line());
                failed += (!outcome.passed) as usize;
            }
            Err(e) => {
                println!("FAIL [{id:>2}] error: {e}");
                failed += 1;
            }
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
