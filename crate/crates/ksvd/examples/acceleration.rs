//! Accelerated variants against plain gradient descent on a small-gap
//! rank-2 instance: heavy-ball and look-ahead momentum over a beta grid,
//! plus the two-sequence scheme.
//!
//! Run with: cargo run --release --example acceleration

use ksvd::accel::{solve_momentum, solve_nesterov, MomentumConfig, NesterovConfig};
use ksvd::matgen::{generate, Family, GeneratorSpec};
use ksvd::rank1::{solve_rank1, SolverConfig};

fn main() {
    let gap = 0.01;
    let (m, truth) = generate(&GeneratorSpec {
        n: 100,
        family: Family::Rank2Gap { gap },
        seed: 3,
    })
    .expect("generator");
    let sigma1 = truth.top_value();

    println!("rank-2, sigma1 = 1, gap = {gap}, n = 100");
    println!();
    println!("{:<22} {:>10} {:>14} {:>11}", "method", "iterations", "sigma error", "converged");

    let base = SolverConfig { seed: 5, ..Default::default() };
    let gd = solve_rank1(&m, &base, None, false).expect("gd");
    println!(
        "{:<22} {:>10} {:>14.2e} {:>11}",
        "gd (eta = 0.5)",
        gd.iterations,
        (gd.sigma_hat - sigma1).abs(),
        gd.converged
    );

    for beta in [0.5, 0.8, 0.9, 0.95] {
        let mut cfg = MomentumConfig::nesterov(beta);
        cfg.seed = 5;
        let res = solve_momentum(&m, &cfg, None, false).expect("momentum");
        println!(
            "{:<22} {:>10} {:>14.2e} {:>11}",
            format!("nesterov beta = {beta}"),
            res.iterations,
            (res.sigma_hat - sigma1).abs(),
            res.converged
        );
    }

    for beta in [0.8, 0.9] {
        let mut cfg = MomentumConfig::polyak(beta);
        cfg.seed = 5;
        let res = solve_momentum(&m, &cfg, None, false).expect("momentum");
        println!(
            "{:<22} {:>10} {:>14.2e} {:>11}",
            format!("polyak beta = {beta}"),
            res.iterations,
            (res.sigma_hat - sigma1).abs(),
            res.converged
        );
    }

    // Two-sequence scheme with the exact local strong convexity (gap / 4).
    let cfg = NesterovConfig {
        mu: Some(gap / 4.0),
        sigma1_est: Some(sigma1),
        seed: 5,
        ..Default::default()
    };
    let res = solve_nesterov(&m, &cfg, None, false).expect("scheme");
    println!(
        "{:<22} {:>10} {:>14.2e} {:>11}",
        "two-sequence scheme",
        res.iterations,
        (res.sigma_hat - sigma1).abs(),
        res.converged
    );
}
