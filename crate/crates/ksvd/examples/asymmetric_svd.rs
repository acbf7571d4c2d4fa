//! Singular triplets of a rectangular matrix through both symmetric
//! reductions: the Gram product N N^T (squares the spectrum) and the
//! dilation embedding [[0, N], [N^T, 0]] (keeps it).
//!
//! Run with: cargo run --release --example asymmetric_svd

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ksvd::driver::{solve_asymmetric, AsymStrategy, Method};
use ksvd::linalg::DenseMatrix;
use ksvd::rank1::SolverConfig;

fn main() {
    let (rows, cols, k) = (30, 20, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut n = DenseMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            n.set(i, j, rng.sample(rand_distr::StandardNormal));
        }
    }

    let method = Method::Gd(SolverConfig {
        eps: 1e-10,
        seed: 1,
        ..Default::default()
    });

    let gram = solve_asymmetric(&n, k, &method, AsymStrategy::Gram).expect("gram");
    let dil = solve_asymmetric(&n, k, &method, AsymStrategy::Dilation).expect("dilation");

    println!("random {rows}x{cols} Gaussian matrix, top {k} singular values");
    println!();
    println!("{:>2} {:>20} {:>20} {:>12}", "i", "gram", "dilation", "rel diff");
    for i in 0..k {
        let g = gram.sigma_hat[i];
        let d = dil.sigma_hat[i];
        println!("{:>2} {:>20.12} {:>20.12} {:>12.2e}", i + 1, g, d, (g - d).abs() / g);
    }

    println!();
    println!("right-vector norms (recovered as N^T u / sigma for gram):");
    for (i, v) in gram.v_hat.iter().enumerate() {
        match v {
            Some(v) => println!("  gram v_{}: ||v|| - 1 = {:.2e}", i + 1, (norm(v) - 1.0).abs()),
            None => println!("  gram v_{}: skipped (singular value too small)", i + 1),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
