//! Sequential deflation driver: runs a rank-1 solver k times, subtracting
//! each recovered pair from the operator implicitly, plus the two entry
//! points for rectangular matrices (Gram reduction and symmetric dilation).

use serde::Serialize;

use crate::accel::{solve_momentum, solve_nesterov, MomentumConfig, MomentumMode, NesterovConfig};
use crate::error::{Error, Result};
use crate::linalg::{
    CountingOperator, Deflated, DenseMatrix, DilationOperator, GramOperator, LinearOperator,
    Spectrum,
};
use crate::linalg::vec;
use crate::power::solve_power;
use crate::rank1::{solve_rank1, Rank1Result, SolverConfig};

/// Rank-1 solver selection together with its configuration.
#[derive(Debug, Clone)]
pub enum Method {
    Gd(SolverConfig),
    Power(SolverConfig),
    /// Momentum iteration; covers both heavy-ball and look-ahead modes.
    Momentum(MomentumConfig),
    /// The two-sequence scheme.
    NesterovGeneral(NesterovConfig),
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::Gd(_) => "gd",
            Method::Power(_) => "power",
            Method::Momentum(c) => match c.mode {
                MomentumMode::Polyak => "polyak",
                MomentumMode::Nesterov => "nesterov",
            },
            Method::NesterovGeneral(_) => "nesterov-general",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Method::Gd(c) | Method::Power(c) => c.seed,
            Method::Momentum(c) => c.seed,
            Method::NesterovGeneral(c) => c.seed,
        }
    }

    pub fn eps(&self) -> f64 {
        match self {
            Method::Gd(c) | Method::Power(c) => c.eps,
            Method::Momentum(c) => c.eps,
            Method::NesterovGeneral(c) => c.eps,
        }
    }

    fn with_seed_eps(&self, seed: u64, eps: f64) -> Method {
        let mut m = self.clone();
        match &mut m {
            Method::Gd(c) | Method::Power(c) => {
                c.seed = seed;
                c.eps = eps;
            }
            Method::Momentum(c) => {
                c.seed = seed;
                c.eps = eps;
            }
            Method::NesterovGeneral(c) => {
                c.seed = seed;
                c.eps = eps;
            }
        }
        m
    }

    /// Runs the selected rank-1 solver.
    pub fn solve(
        &self,
        m: &dyn LinearOperator,
        reference: Option<&Spectrum>,
        record_trace: bool,
    ) -> Result<Rank1Result> {
        match self {
            Method::Gd(c) => solve_rank1(m, c, reference, record_trace),
            Method::Power(c) => solve_power(m, c, reference, record_trace),
            Method::Momentum(c) => solve_momentum(m, c, reference, record_trace),
            Method::NesterovGeneral(c) => solve_nesterov(m, c, reference, record_trace),
        }
    }
}

/// One recovered eigenpair.
#[derive(Debug, Clone, Serialize)]
pub struct RecoveredPair {
    pub sigma: f64,
    pub u: Vec<f64>,
}

/// Top-k recovery in extraction order. `sigma` values are reported exactly
/// as recovered (not re-sorted), so an ordering violation stays visible.
#[derive(Debug, Clone, Serialize)]
pub struct KsvdResult {
    pub method: String,
    pub converged: bool,
    pub pairs: Vec<RecoveredPair>,
    #[serde(rename = "iterations")]
    pub per_pair_iterations: Vec<usize>,
    #[serde(rename = "matvecs")]
    pub total_matvecs: u64,
}

impl KsvdResult {
    pub fn sigma_values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.sigma).collect()
    }

    /// Cosmetic post-processing only: Gram-Schmidt on the recovered
    /// directions. The solver itself never re-orthogonalizes (doing so
    /// would change the method whose raw output the errors describe);
    /// use this when downstream code requires an exactly orthonormal
    /// basis and the `1e-4`-level cross-talk between recovered pairs is
    /// acceptable to hide.
    pub fn with_orthogonalized_vectors(mut self) -> KsvdResult {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(self.pairs.len());
        for pair in &mut self.pairs {
            let mut u = pair.u.clone();
            for _pass in 0..2 {
                for b in &basis {
                    let c = crate::linalg::vec::dot(&u, b);
                    for (x, y) in u.iter_mut().zip(b) {
                        *x -= c * y;
                    }
                }
            }
            let norm = crate::linalg::vec::norm(&u);
            if norm > 0.0 {
                pair.u = crate::linalg::vec::scaled(&u, 1.0 / norm);
            }
            basis.push(pair.u.clone());
        }
        self
    }
}

/// Extracts the top-k eigenpairs by repeated rank-1 solves with implicit
/// deflation. Level `l` runs with seed `base_seed + l`; for `k > 1` the
/// inner solves run at `eps / 100` of the configured tolerance so deflation
/// noise stays well under the requested outer accuracy (for `k = 1` the
/// configured tolerance is used unchanged and the result is exactly the
/// rank-1 solver's).
///
/// A non-converged level marks the whole result non-converged but recovery
/// continues; hard solver errors abort with the level index attached.
pub fn solve_ksvd(m: &dyn LinearOperator, k: usize, method: &Method) -> Result<KsvdResult> {
    if k == 0 || k > m.dim() {
        return Err(Error::InvalidConfig(format!(
            "k must be in 1..={}, got {k}",
            m.dim()
        )));
    }
    let counting = CountingOperator::new(m);
    let mut deflated = Deflated::new(&counting, Vec::new())?;
    let inner_eps = if k == 1 {
        method.eps()
    } else {
        method.eps() / 100.0
    };
    let base_seed = method.seed();

    let mut pairs = Vec::with_capacity(k);
    let mut per_pair_iterations = Vec::with_capacity(k);
    let mut converged = true;
    for level in 0..k {
        let level_method = method.with_seed_eps(base_seed.wrapping_add(level as u64), inner_eps);
        let res = level_method
            .solve(&deflated, None, false)
            .map_err(|e| Error::AtLevel {
                level,
                source: Box::new(e),
            })?;
        converged &= res.converged;
        per_pair_iterations.push(res.iterations);
        deflated.push(res.sigma_hat, res.u_hat.clone())?;
        pairs.push(RecoveredPair {
            sigma: res.sigma_hat,
            u: res.u_hat,
        });
    }

    Ok(KsvdResult {
        method: method.label().to_string(),
        converged,
        pairs,
        per_pair_iterations,
        total_matvecs: counting.count(),
    })
}

/// How a rectangular matrix is reduced to a symmetric eigenproblem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AsymStrategy {
    /// Solve on `v -> N (N^T v)`; eigenvalues are squared singular values.
    Gram,
    /// Solve on the symmetric `(m+n)`-dimensional embedding
    /// `[[0, N], [N^T, 0]]`; positive eigenvalues are singular values and
    /// eigenvectors split into left/right halves.
    Dilation,
}

impl AsymStrategy {
    pub fn label(&self) -> &'static str {
        match self {
            AsymStrategy::Gram => "gram",
            AsymStrategy::Dilation => "dilation",
        }
    }
}

/// Singular triplets of a rectangular matrix. A `None` right vector marks a
/// pair whose singular value was too small for the division
/// `v = N^T u / sigma` to be trustworthy.
#[derive(Debug, Clone, Serialize)]
pub struct AsymResult {
    pub method: String,
    pub strategy: String,
    pub converged: bool,
    pub sigma_hat: Vec<f64>,
    pub u_hat: Vec<Vec<f64>>,
    pub v_hat: Vec<Option<Vec<f64>>>,
    pub iterations: Vec<usize>,
    pub matvecs: u64,
}

/// Top-k singular value decomposition of a general m-by-n matrix through
/// the selected symmetric reduction.
pub fn solve_asymmetric(
    n_mat: &DenseMatrix,
    k: usize,
    method: &Method,
    strategy: AsymStrategy,
) -> Result<AsymResult> {
    let min_dim = n_mat.rows().min(n_mat.cols());
    if k == 0 || k > min_dim {
        return Err(Error::InvalidConfig(format!(
            "k must be in 1..={min_dim}, got {k}"
        )));
    }

    match strategy {
        AsymStrategy::Gram => {
            let op = GramOperator::new(n_mat);
            let res = solve_ksvd(&op, k, method)?;
            let (sigma_hat, u_hat, v_hat) = gram_triplets(n_mat, &res);
            Ok(AsymResult {
                method: res.method,
                strategy: strategy.label().to_string(),
                converged: res.converged,
                sigma_hat,
                u_hat,
                v_hat,
                iterations: res.per_pair_iterations,
                matvecs: res.total_matvecs,
            })
        }
        AsymStrategy::Dilation => {
            let op = DilationOperator::new(n_mat);
            let split = op.split();
            let res = solve_ksvd(&op, k, method)?;
            let mut sigma_hat = Vec::with_capacity(k);
            let mut u_hat = Vec::with_capacity(k);
            let mut v_hat = Vec::with_capacity(k);
            for pair in &res.pairs {
                sigma_hat.push(pair.sigma);
                let (top, bottom) = pair.u.split_at(split);
                let nu = vec::norm(top);
                let nv = vec::norm(bottom);
                if nu == 0.0 || nv == 0.0 {
                    return Err(Error::ZeroNorm);
                }
                u_hat.push(vec::scaled(top, 1.0 / nu));
                v_hat.push(Some(vec::scaled(bottom, 1.0 / nv)));
            }
            Ok(AsymResult {
                method: res.method,
                strategy: strategy.label().to_string(),
                converged: res.converged,
                sigma_hat,
                u_hat,
                v_hat,
                iterations: res.per_pair_iterations,
                matvecs: res.total_matvecs,
            })
        }
    }
}

/// `(sigma_hat, u_hat, v_hat)` of an asymmetric recovery.
type SingularTriplets = (Vec<f64>, Vec<Vec<f64>>, Vec<Option<Vec<f64>>>);

/// Converts eigenpairs of `N N^T` into singular triplets:
/// `sigma = sqrt(max(lambda, 0))`, `v = N^T u / sigma`. Pairs whose sigma
/// falls below `1e-12` of the leading one skip the right vector — the
/// division amplifies noise without bound there.
fn gram_triplets(n_mat: &DenseMatrix, res: &KsvdResult) -> SingularTriplets {
    let sigma_hat: Vec<f64> = res.pairs.iter().map(|p| p.sigma.max(0.0).sqrt()).collect();
    let top = sigma_hat.first().copied().unwrap_or(0.0);
    let mut u_hat = Vec::with_capacity(res.pairs.len());
    let mut v_hat = Vec::with_capacity(res.pairs.len());
    for (pair, sigma) in res.pairs.iter().zip(&sigma_hat) {
        u_hat.push(pair.u.clone());
        if *sigma <= 1e-12 * top {
            v_hat.push(None);
        } else {
            v_hat.push(Some(vec::scaled(
                &n_mat.apply_transpose(&pair.u),
                1.0 / sigma,
            )));
        }
    }
    (sigma_hat, u_hat, v_hat)
}

/// Recovery errors against a ground-truth spectrum:
/// `eps_sigma = max_i |sigma_i - sigma_hat_i|` (operator norm of the
/// diagonal difference) and the subspace projector distance
/// `eps_uv = ||U U^T - Uhat Uhat^T||_F` over the first `k` pairs.
pub fn recovery_errors(result: &KsvdResult, truth: &Spectrum, k: usize) -> Result<(f64, f64)> {
    if truth.len() < k || result.pairs.len() < k {
        return Err(Error::InvalidConfig(format!(
            "need at least {k} recovered and true pairs"
        )));
    }
    let mut eps_sigma: f64 = 0.0;
    for i in 0..k {
        eps_sigma = eps_sigma.max((truth.values[i] - result.pairs[i].sigma).abs());
    }
    // ||P - Q||_F^2 = 2k - 2 sum_ij <u_i, uhat_j>^2 for orthonormal sets;
    // the recovered set is only approximately orthonormal, so compute the
    // Gram corrections explicitly.
    let mut p_norm2 = 0.0;
    let mut q_norm2 = 0.0;
    let mut cross = 0.0;
    for i in 0..k {
        for j in 0..k {
            let tt = vec::dot(&truth.vectors[i], &truth.vectors[j]);
            p_norm2 += tt * tt;
            let hh = vec::dot(&result.pairs[i].u, &result.pairs[j].u);
            q_norm2 += hh * hh;
            let th = vec::dot(&truth.vectors[i], &result.pairs[j].u);
            cross += th * th;
        }
    }
    let eps_uv = (p_norm2 + q_norm2 - 2.0 * cross).max(0.0).sqrt();
    Ok((eps_sigma, eps_uv))
}

/// Whether the relative-gap condition
/// `(sigma_i - sigma_{i+1}) / (2 sigma_i) >= eps` holds for every level
/// `i <= k`; outside it, per-level recovery guarantees do not apply (the
/// driver still runs).
pub fn gap_condition_satisfied(truth: &Spectrum, k: usize, eps: f64) -> bool {
    for i in 0..k.min(truth.len()) {
        let next = truth.values.get(i + 1).copied().unwrap_or(0.0);
        let sigma = truth.values[i];
        if sigma <= 0.0 || (sigma - next) / (2.0 * sigma) < eps {
            return false;
        }
    }
    true
}
