//! Per-iteration diagnostics exported as CSV for external plotting:
//! iterate norm, alignment cosine, Heron residual, gradient norm, and the
//! two stopping measures.
//!
//! Run with: cargo run --release --example trace_to_csv

use std::fs;

use ksvd::accel::MomentumConfig;
use ksvd::matgen::{generate, Family, GeneratorSpec};
use ksvd::driver::Method;
use ksvd::rank1::SolverConfig;
use ksvd::trace::trace_to_csv;

fn main() {
    let (m, truth) = generate(&GeneratorSpec {
        n: 80,
        family: Family::Rank2Gap { gap: 0.05 },
        seed: 2,
    })
    .expect("generator");

    let dir = std::env::temp_dir().join("ksvd_trace_example");
    fs::create_dir_all(&dir).expect("temp dir");

    // Plain gradient descent: base schema.
    let gd = Method::Gd(SolverConfig { seed: 4, ..Default::default() });
    let res = gd.solve(&m, Some(&truth), true).expect("gd solve");
    let path = dir.join("gd_trace.csv");
    fs::write(&path, trace_to_csv(res.trace.as_ref().unwrap(), None)).expect("write");
    println!("gd: {} iterations -> {}", res.iterations, path.display());

    // Momentum run: same schema plus a trailing mode column.
    let nm = Method::Momentum(MomentumConfig::nesterov(0.9).with_seed(4));
    let res = nm.solve(&m, Some(&truth), true).expect("momentum solve");
    let path = dir.join("nesterov_trace.csv");
    fs::write(&path, trace_to_csv(res.trace.as_ref().unwrap(), Some(nm.label()))).expect("write");
    println!("nesterov: {} iterations -> {}", res.iterations, path.display());

    let text = fs::read_to_string(&path).expect("read back");
    println!();
    println!("first lines of the momentum trace:");
    for line in text.lines().take(5) {
        println!("  {line}");
    }
}
