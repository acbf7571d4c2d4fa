//! Top-k SVD of symmetric positive semi-definite matrices by gradient
//! descent with an adaptive step size.
//!
//! The core iteration minimizes the rank-1 factorization objective
//! `g(x) = 1/4 ||M - x x^T||_F^2` with steps scaled by `eta / ||x_t||^2`,
//! which makes the iterate norm follow the Babylonian square-root recursion
//! while the direction aligns with the top eigenvector. Repeated solves
//! with implicit deflation recover the leading k eigenpairs; rectangular
//! matrices reduce to symmetric ones through the Gram product or the
//! symmetric dilation embedding.
//!
//! What's here:
//!
//! - [`linalg`]: dense matrices, the [`linalg::LinearOperator`] matvec
//!   abstraction, and a self-contained Jacobi eigensolver used as the
//!   verification oracle.
//! - [`objective`]: the objective, gradient, Hessian action, local
//!   curvature constants, and exact error-decomposition identities.
//! - [`rank1`]: the adaptive-step gradient solver with per-iteration
//!   diagnostics.
//! - [`accel`]: Nesterov's two-sequence scheme and the single-sequence
//!   momentum iteration (heavy-ball / look-ahead).
//! - [`power`]: the power-method baseline under the same stopping rule.
//! - [`driver`]: sequential deflation for top-k extraction and the
//!   asymmetric entry points.
//! - [`matgen`]: seeded synthetic instances with known spectra.
//! - [`market`]: Matrix Market ingestion and spectrum JSON output.
//! - [`trace`]: CSV serialization of solver traces.
//! - [`bench`]: gap sweeps, the decay benchmark, slope fits, and the
//!   invariant verification suite.
//!
//! Start with the examples:
//!
//! ```bash
//! cargo run --release --example rank1_quadratic
//! cargo run --release --example top_k_deflation
//! cargo run --release --example acceleration
//! cargo run --release --example power_baseline
//! cargo run --release --example asymmetric_svd
//! cargo run --release --example gap_sweep
//! cargo run --release --example matrix_market
//! cargo run --release --example trace_to_csv
//! cargo run --release --example verify_invariants
//! ```
//!
//! The `ksvd` binary exposes the same functionality as subcommands
//! (`solve`, `gapsweep`, `decaybench`, `verify`).

pub mod accel;
pub mod bench;
pub mod driver;
pub mod error;
pub mod linalg;
pub mod market;
pub mod matgen;
pub mod objective;
pub mod power;
pub mod rank1;
pub mod trace;

pub use accel::{MomentumConfig, MomentumMode, NesterovConfig};
pub use driver::{AsymResult, AsymStrategy, KsvdResult, Method};
pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseSymMatrix, LinearOperator, Spectrum};
pub use rank1::{Rank1Result, SolverConfig, TraceRecord};
