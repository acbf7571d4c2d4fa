//! Matrix Market round trip: write a small symmetric file, load it, solve
//! for its full spectrum, and emit the result as JSON.
//!
//! Run with: cargo run --release --example matrix_market

use std::fs;

use ksvd::driver::{solve_ksvd, Method};
use ksvd::linalg::jacobi_eigh;
use ksvd::market::{load_matrix_market, write_spectrum_json, LoadedMatrix};
use ksvd::rank1::SolverConfig;

fn main() {
    let dir = std::env::temp_dir().join("ksvd_matrix_market_example");
    fs::create_dir_all(&dir).expect("temp dir");
    let mtx_path = dir.join("example.mtx");

    // Coordinate format, symmetric: store the lower triangle only.
    let mtx = "%%MatrixMarket matrix coordinate real symmetric\n\
               % 3x3 arrow matrix\n\
               3 3 5\n\
               1 1 4.0\n\
               2 2 3.0\n\
               3 3 2.0\n\
               2 1 1.0\n\
               3 1 0.5\n";
    fs::write(&mtx_path, mtx).expect("write mtx");

    let m = match load_matrix_market(&mtx_path).expect("load") {
        LoadedMatrix::Symmetric(m) => m,
        LoadedMatrix::General(_) => unreachable!("header says symmetric"),
    };
    println!("loaded {} ({} x {})", mtx_path.display(), m.dim(), m.dim());

    let method = Method::Gd(SolverConfig {
        eps: 1e-10,
        ..Default::default()
    });
    let res = solve_ksvd(&m, 3, &method).expect("solve");
    let oracle = jacobi_eigh(&m).expect("oracle");

    println!();
    println!("{:>2} {:>20} {:>20}", "i", "solved", "oracle");
    for (i, pair) in res.pairs.iter().enumerate() {
        println!("{:>2} {:>20.12} {:>20.12}", i + 1, pair.sigma, oracle.values[i]);
    }

    let json_path = dir.join("spectrum.json");
    write_spectrum_json(&oracle, fs::File::create(&json_path).expect("create")).expect("json");
    println!();
    println!("spectrum written to {}", json_path.display());
    println!("{}", fs::read_to_string(&json_path).expect("read back").trim());
}
