use std::process::ExitCode;

use canetoads_lab::acceptance::{run_criterion, ALL};

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_else(|| ALL.to_vec());
    let mut failed = 0;
    for id in only {
        let o = run_criterion(id);
        println!("{o}");
        failed += usize::from(!o.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
