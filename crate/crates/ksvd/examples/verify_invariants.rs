//! Runs the fast invariant suite programmatically and prints the
//! observed-vs-bound report (same checks as `ksvd verify --level fast`).
//!
//! Run with: cargo run --release --example verify_invariants

use ksvd::bench::verify::{report_suite, run_suite, VerifyLevel};

fn main() {
    let results = run_suite(VerifyLevel::Fast, 0);
    let all = report_suite(&results, std::io::stdout());
    println!();
    println!(
        "{} checks, {}",
        results.len(),
        if all { "all passed" } else { "FAILURES present" }
    );
    std::process::exit(if all { 0 } else { 1 });
}
