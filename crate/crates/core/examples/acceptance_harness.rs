//! Runs the eight acceptance checks and prints one line each.
//!
//! `cargo run --release --example acceptance_harness -- 7` runs a single check.

use pcsp_lab::selftest::{run_all, run_criterion, SelftestConfig};

fn main() {
    let config = SelftestConfig::default();
    let reports = match std::env::args().nth(1).and_then(|a| a.parse().ok()) {
        Some(id) => vec![run_criterion(id, &config)],
        None => run_all(&config),
    };
    for r in &reports {
        println!("{} [{:.2?}]", r.line(), r.elapsed);
    }
    if reports.iter().any(|r| !r.passed) {
        std::process::exit(1);
    }
}
