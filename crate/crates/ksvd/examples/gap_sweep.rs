//! A compact gap sweep through the library API: iteration counts versus
//! spectral gap for plain gradient descent and best-beta momentum, with
//! log-log slope fits (expected near 1.0 for gd, near 0.5 accelerated).
//!
//! Run with: cargo run --release --example gap_sweep

use ksvd::bench::{run_gap_sweep, MethodKind, SweepParams};

fn main() {
    let params = SweepParams {
        gaps: (2..=10).map(|k| 10f64.powf(-(k as f64) / 4.0)).collect(),
        n_list: vec![100],
        methods: vec![MethodKind::Gd, MethodKind::Power, MethodKind::Nesterov],
        repeats: 3,
        seed: 0,
        max_iter: 200_000,
        ..Default::default()
    };
    let report = run_gap_sweep(&params).expect("sweep");

    println!("{:>10} {:<10} {:>8} {:>14}", "gap", "method", "beta", "med iters");
    for row in &report.rows {
        println!(
            "{:>10.4e} {:<10} {:>8} {:>14}",
            row.gap, row.method, row.beta_or_mode, row.iterations_median
        );
    }
    println!();
    for (method, fit) in &report.slopes {
        match fit {
            Some(f) => println!("{method}: slope {:.3} over {} cells", f.slope, f.cells),
            None => println!("{method}: no converged cells"),
        }
    }
}
