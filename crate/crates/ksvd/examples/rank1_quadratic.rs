//! Rank-1 warm-up: on `M = sigma u u^T` the adaptive-step gradient
//! iteration reduces to the Babylonian square-root recursion, so the norm
//! residual `eps_t = ||x_t||/sqrt(sigma) - 1` contracts quadratically.
//!
//! Run with: cargo run --release --example rank1_quadratic

use ksvd::matgen::{generate, Family, GeneratorSpec};
use ksvd::rank1::{solve_rank1, SolverConfig};

fn main() {
    let (m, truth) = generate(&GeneratorSpec {
        n: 100,
        family: Family::Rank1 { sigma: 3.0 },
        seed: 7,
    })
    .expect("generator");

    let cfg = SolverConfig::default();
    let res = solve_rank1(&m, &cfg, Some(&truth), true).expect("solve");

    println!("rank-1 instance, sigma = 3, n = 100");
    println!("converged = {}, iterations = {}", res.converged, res.iterations);
    println!("sigma_hat = {:.16} (error {:.2e})", res.sigma_hat, (res.sigma_hat - 3.0).abs());
    println!();
    println!("{:>3}  {:>24}  {:>13}  {:>13}", "t", "eps_t", "eps_t^2/2", "predicted");

    let trace = res.trace.unwrap();
    let mut prev: Option<f64> = None;
    for rec in &trace {
        let eps = rec.heron_eps.unwrap();
        match prev {
            Some(p) => println!(
                "{:>3}  {:>24.16e}  {:>13.3e}  {:>13.3e}",
                rec.t,
                eps,
                p * p / 2.0,
                p * p / (2.0 * (p + 1.0)),
            ),
            None => println!("{:>3}  {:>24.16e}", rec.t, eps),
        }
        prev = Some(eps);
    }
    println!();
    println!("each residual is bounded by half the previous square, and");
    println!("matches the exact recursion eps' = eps^2 / (2 (eps + 1)).");
}
