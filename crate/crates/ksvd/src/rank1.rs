//! The core rank-1 solver: gradient descent on `g` with the adaptive step
//! `eta / ||x_t||^2`, image-of-the-operator random initialization, the
//! two-sided stopping rule, and per-iteration diagnostics.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{matvec, LinearOperator, Spectrum};
use crate::linalg::vec;

/// Configuration shared by the plain gradient solver and the power-method
/// baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Step parameter in `(0, 1)`; `1/2` is the analytically covered choice.
    pub eta: f64,
    /// Stopping tolerance applied to both successive-change measures.
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eta: 0.5,
            eps: 1e-8,
            max_iter: 500_000,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eta.is_nan() || self.eta <= 0.0 || self.eta >= 1.0 {
            return Err(Error::InvalidConfig("eta must be in (0, 1)".into()));
        }
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::InvalidConfig("eps must be positive".into()));
        }
        if self.max_iter < 2 {
            return Err(Error::InvalidConfig("max_iter must be >= 2".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Per-iteration diagnostics. Reference-dependent fields are `None` when no
/// ground-truth spectrum was supplied; the change measures are `None` at
/// `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    /// `||x_t||`
    pub norm_x: f64,
    /// `x_t . u1 / ||x_t||` against the reference top eigenvector.
    pub cos_theta1: Option<f64>,
    /// `||x_t|| / sqrt(sigma1) - 1` against the reference top eigenvalue.
    pub heron_eps: Option<f64>,
    /// `||grad g(x_t)||`
    pub grad_norm: f64,
    /// `||x_t/||x_t|| - x_{t-1}/||x_{t-1}||||`
    pub eps_u: Option<f64>,
    /// `| ||x_t||^2 - ||x_{t-1}||^2 |`
    pub eps_sigma: Option<f64>,
}

impl TraceRecord {
    fn reference_fields(x: &[f64], norm_x: f64, reference: Option<&Spectrum>) -> (Option<f64>, Option<f64>) {
        match reference {
            Some(spec) if !spec.is_empty() => {
                let cos = vec::dot(x, spec.top_vector()) / norm_x;
                let heron = norm_x / spec.top_value().sqrt() - 1.0;
                (Some(cos), Some(heron))
            }
            _ => (None, None),
        }
    }

    /// Record for the initial iterate, before any step was taken.
    pub fn initial(x0: &[f64], m: &dyn LinearOperator, reference: Option<&Spectrum>) -> Self {
        let norm_x = vec::norm(x0);
        let (cos_theta1, heron_eps) = Self::reference_fields(x0, norm_x, reference);
        let grad = grad_from_matvec(x0, &m.apply(x0));
        Self {
            t: 0,
            norm_x,
            cos_theta1,
            heron_eps,
            grad_norm: vec::norm(&grad),
            eps_u: None,
            eps_sigma: None,
        }
    }
}

/// Result of a single rank-1 solve, by any of the iterative methods.
#[derive(Debug, Clone)]
pub struct Rank1Result {
    /// Recovered eigenvalue estimate (`||x||^2` for gradient methods,
    /// `||Mx||` for the power baseline).
    pub sigma_hat: f64,
    /// Recovered unit direction.
    pub u_hat: Vec<f64>,
    /// Number of update steps performed.
    pub iterations: usize,
    /// Whether the two-sided stopping rule fired before `max_iter`.
    pub converged: bool,
    /// Set when a momentum run tripped the norm-blowup guard.
    pub diverged: bool,
    pub trace: Option<Vec<TraceRecord>>,
}

/// Constants of the norm band `[a sqrt(sigma1), b sqrt(sigma1)]` that the
/// iterates enter by iteration `tau` and never leave. Test-only analysis
/// quantities; they require the exact spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionConstants {
    pub a: f64,
    pub b: f64,
    pub tau: usize,
}

pub(crate) fn grad_from_matvec(x: &[f64], mx: &[f64]) -> Vec<f64> {
    let n2 = vec::norm2(x);
    x.iter().zip(mx).map(|(xi, mi)| n2 * xi - mi).collect()
}

/// Shared update arithmetic `(1 - eta) y + (eta / ||y||^2) My`, used
/// verbatim by the plain, momentum, and Nesterov-scheme steps so that their
/// zero-momentum limits reproduce plain gradient descent bit for bit.
pub(crate) fn gd_update(y: &[f64], my: &[f64], eta: f64, ny2: f64) -> Vec<f64> {
    let scale = eta / ny2;
    y.iter()
        .zip(my)
        .map(|(yi, myi)| (1.0 - eta) * yi + scale * myi)
        .collect()
}

/// Samples `x0 = M z` with `z` standard normal from a ChaCha8 stream seeded
/// by `seed` (normal variates via the ziggurat transform). If `M z` lands
/// exactly in the kernel the draw is repeated on the next stream id, up to
/// 16 times.
pub fn random_init(m: &dyn LinearOperator, seed: u64) -> Result<Vec<f64>> {
    const ATTEMPTS: usize = 16;
    for attempt in 0..ATTEMPTS as u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(attempt);
        let z: Vec<f64> = (0..m.dim()).map(|_| rng.sample(StandardNormal)).collect();
        let x0 = m.apply(&z);
        if vec::norm(&x0) > 0.0 {
            return Ok(x0);
        }
    }
    Err(Error::InitExhausted { attempts: ATTEMPTS })
}

/// One adaptive-step update `x - (eta / ||x||^2) grad g(x)`, computed in the
/// algebraically simplified form `(1 - eta) x + (eta / ||x||^2) M x`.
pub fn gd_step(x: &[f64], m: &dyn LinearOperator, eta: f64) -> Result<Vec<f64>> {
    let ny2 = vec::norm2(x);
    if ny2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let mx = matvec(m, x)?;
    Ok(gd_update(x, &mx, eta, ny2))
}

/// Fills a [`TraceRecord`] for iterate `x` with predecessor `x_prev`.
/// Costs one matvec (for the gradient norm).
pub fn diagnostics(
    t: usize,
    x: &[f64],
    x_prev: &[f64],
    m: &dyn LinearOperator,
    reference: Option<&Spectrum>,
) -> TraceRecord {
    let norm_x = vec::norm(x);
    let norm_prev = vec::norm(x_prev);
    debug_assert!(norm_x > 0.0 && norm_prev > 0.0);
    let (cos_theta1, heron_eps) = TraceRecord::reference_fields(x, norm_x, reference);
    let grad = grad_from_matvec(x, &m.apply(x));
    let (eps_u, eps_sigma) = step_changes(x, norm_x, x_prev, norm_prev);
    TraceRecord {
        t,
        norm_x,
        cos_theta1,
        heron_eps,
        grad_norm: vec::norm(&grad),
        eps_u: Some(eps_u),
        eps_sigma: Some(eps_sigma),
    }
}

/// `(||x^ - p^||, | ||x||^2 - ||p||^2 |)` for the stopping rule.
pub(crate) fn step_changes(x: &[f64], norm_x: f64, prev: &[f64], norm_prev: f64) -> (f64, f64) {
    let mut diff2 = 0.0;
    for (xi, pi) in x.iter().zip(prev) {
        let d = xi / norm_x - pi / norm_prev;
        diff2 += d * d;
    }
    (
        diff2.sqrt(),
        (norm_x * norm_x - norm_prev * norm_prev).abs(),
    )
}

/// Whether the stopping rule fires: both successive-change measures below
/// `eps`, evaluated from iteration 2 onward.
pub(crate) fn should_stop(t: usize, eps_u: f64, eps_sigma: f64, eps: f64) -> bool {
    t >= 2 && eps_u < eps && eps_sigma < eps
}

/// Runs the adaptive-step gradient iteration from the random initialization
/// until both `eps_u` and `eps_sigma` fall below `cfg.eps` (checked from
/// iteration 2 onward) or `cfg.max_iter` is reached.
pub fn solve_rank1(
    m: &dyn LinearOperator,
    cfg: &SolverConfig,
    reference: Option<&Spectrum>,
    record_trace: bool,
) -> Result<Rank1Result> {
    cfg.validate()?;
    let mut x = random_init(m, cfg.seed)?;
    let mut trace = if record_trace {
        Some(vec![TraceRecord::initial(&x, m, reference)])
    } else {
        None
    };

    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=cfg.max_iter {
        let x_next = gd_step(&x, m, cfg.eta)?;
        let norm_next = vec::norm(&x_next);
        if norm_next == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let (eps_u, eps_sigma) = step_changes(&x_next, norm_next, &x, vec::norm(&x));
        if let Some(tr) = trace.as_mut() {
            tr.push(diagnostics(t, &x_next, &x, m, reference));
        }
        x = x_next;
        iterations = t;
        if should_stop(t, eps_u, eps_sigma, cfg.eps) {
            converged = true;
            break;
        }
    }

    let norm_x = vec::norm(&x);
    Ok(Rank1Result {
        sigma_hat: norm_x * norm_x,
        u_hat: vec::scaled(&x, 1.0 / norm_x),
        iterations,
        converged,
        diverged: false,
        trace,
    })
}

/// Computes the attraction-band constants
/// `a = 2 sqrt(eta (1 - eta)) max(|cos| , sqrt(sigma_d / sigma1))`,
/// `b = 2 (1 - eta) + sqrt(eta / (1 - eta)) min(1 / |cos|, sqrt(sigma1 / sigma_d))`,
/// and the entry time
/// `tau = max(1, ceil((4 / 3 eta) ln((1/2)((1 - eta)||x0|| / sqrt(sigma1) + eta sqrt(sigma1) / ||x0||))))`,
/// where `cos` is the initial alignment `x0 . u1 / ||x0||`.
///
/// Requires the exact spectrum of the operator restricted to its image
/// (all listed eigenvalues strictly positive).
pub fn attraction_constants(
    x0: &[f64],
    spectrum: &Spectrum,
    eta: f64,
) -> Result<AttractionConstants> {
    if eta.is_nan() || eta <= 0.0 || eta >= 1.0 {
        return Err(Error::InvalidConfig("eta must be in (0, 1)".into()));
    }
    if spectrum.is_empty() {
        return Err(Error::InvalidConfig("empty spectrum".into()));
    }
    let sigma1 = spectrum.top_value();
    let sigma_d = *spectrum.values.last().unwrap();
    if sigma_d <= 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    let norm_x0 = vec::norm(x0);
    if norm_x0 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let cos0 = (vec::dot(x0, spectrum.top_vector()) / norm_x0).abs();
    let ratio = (sigma_d / sigma1).sqrt();

    let a = 2.0 * (eta * (1.0 - eta)).sqrt() * cos0.max(ratio);
    let b = 2.0 * (1.0 - eta)
        + (eta / (1.0 - eta)).sqrt() * (cos0.recip().min((sigma1 / sigma_d).sqrt()));

    let r = norm_x0 / sigma1.sqrt();
    let inner = 0.5 * ((1.0 - eta) * r + eta / r);
    let tau_f = (4.0 / (3.0 * eta)) * inner.ln();
    let tau = if tau_f.is_finite() && tau_f > 1.0 {
        tau_f.ceil() as usize
    } else {
        1
    };

    Ok(AttractionConstants { a, b, tau })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{jacobi_eigh, DenseSymMatrix};
    use crate::objective::grad_g;

    fn rank1_matrix(n: usize, sigma: f64, seed: u64) -> (DenseSymMatrix, Vec<f64>) {
        let z = random_init(&DenseSymMatrix::identity(n), seed).unwrap();
        let u = vec::normalized(&z);
        let m = DenseSymMatrix::from_outer_sum(n, &[(sigma, u.clone())]).unwrap();
        (m, u)
    }

    #[test]
    fn gd_step_is_heron_on_rank1() {
        let (m, u) = rank1_matrix(5, 2.0, 3);
        let c = 0.7;
        let x = vec::scaled(&u, c);
        let next = gd_step(&x, &m, 0.5).unwrap();
        let expected = vec::scaled(&u, 0.5 * (c + 2.0 / c));
        for (a, b) in next.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn gd_step_fixed_point() {
        let (m, u) = rank1_matrix(4, 3.0, 5);
        let x = vec::scaled(&u, 3.0f64.sqrt());
        let next = gd_step(&x, &m, 0.5).unwrap();
        for (a, b) in next.iter().zip(&x) {
            assert!((a - b).abs() <= 1e-13 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn gd_step_hand_example() {
        // eta = 1/2, M = diag(4, 1), x = (1, 1): all quantities are powers
        // of two, so the closed form is exact.
        let m = DenseSymMatrix::diagonal(&[4.0, 1.0]);
        let next = gd_step(&[1.0, 1.0], &m, 0.5).unwrap();
        assert_eq!(next, vec![1.5, 0.75]);
    }

    #[test]
    fn gd_step_zero_vector_errors() {
        let m = DenseSymMatrix::identity(2);
        assert!(matches!(
            gd_step(&[0.0, 0.0], &m, 0.5),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn gd_step_equals_definitional_update() {
        let (m, _) = rank1_matrix(6, 2.0, 7);
        let x = random_init(&DenseSymMatrix::identity(6), 8).unwrap();
        let eta = 0.37;
        let simplified = gd_step(&x, &m, eta).unwrap();
        let grad = grad_g(&x, &m).unwrap();
        let definitional = vec::add_scaled(&x, -eta / vec::norm2(&x), &grad);
        for (a, b) in simplified.iter().zip(&definitional) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn random_init_zero_operator_errors() {
        let m = DenseSymMatrix::zeros(3);
        assert!(matches!(
            random_init(&m, 1),
            Err(Error::InitExhausted { .. })
        ));
    }

    #[test]
    fn random_init_identity_and_determinism() {
        let m = DenseSymMatrix::identity(5);
        let a = random_init(&m, 42).unwrap();
        let b = random_init(&m, 42).unwrap();
        assert_eq!(a, b);
        assert!(vec::norm(&a) > 0.0);
        assert_ne!(a, random_init(&m, 43).unwrap());
    }

    #[test]
    fn random_init_lands_in_image_of_rank1() {
        let (m, u) = rank1_matrix(8, 1.5, 11);
        let x0 = random_init(&m, 12).unwrap();
        let xh = vec::normalized(&x0);
        let off = vec::add_scaled(&xh, -vec::dot(&xh, &u), &u);
        assert!(vec::norm(&off) <= 1e-12);
    }

    #[test]
    fn solve_rank1_exact_rank1_is_quadratic() {
        let (m, u) = rank1_matrix(20, 3.0, 17);
        let cfg = SolverConfig::default();
        let res = solve_rank1(&m, &cfg, None, false).unwrap();
        assert!(res.converged);
        assert!(res.iterations <= 15, "iterations = {}", res.iterations);
        assert!((res.sigma_hat - 3.0).abs() <= 1e-10);
        assert!(vec::sign_agnostic_distance(&res.u_hat, &u) <= 1e-8);
    }

    #[test]
    fn solve_rank1_matches_oracle_on_diag() {
        let m = DenseSymMatrix::diagonal(&[2.0, 1.0]);
        let cfg = SolverConfig::default().with_seed(3);
        let res = solve_rank1(&m, &cfg, None, false).unwrap();
        assert!(res.converged);
        assert!((res.sigma_hat - 2.0).abs() <= 1e-6);
        assert!(vec::sign_agnostic_distance(&res.u_hat, &[1.0, 0.0]) <= 1e-4);
    }

    #[test]
    fn solve_rank1_larger_instance_against_oracle() {
        // 20x20 with top value 1.0 and gap 0.5.
        let mut diag = vec![0.0; 20];
        diag[0] = 1.0;
        diag[1] = 0.5;
        for (i, d) in diag.iter_mut().enumerate().skip(2) {
            *d = 0.4 / (1.0 + i as f64);
        }
        let m = DenseSymMatrix::diagonal(&diag);
        let spec = jacobi_eigh(&m).unwrap();
        let cfg = SolverConfig::default().with_seed(5);
        let res = solve_rank1(&m, &cfg, Some(&spec), true).unwrap();
        assert!(res.converged);
        assert!(res.iterations >= 2);
        assert!((res.sigma_hat - 1.0).abs() <= 1e-6);
        assert!(vec::sign_agnostic_distance(&res.u_hat, &spec.vectors[0]) <= 1e-4);
        let trace = res.trace.unwrap();
        assert_eq!(trace.len(), res.iterations + 1);
        // Alignment is monotone in |cos theta1|.
        let cosines: Vec<f64> = trace.iter().map(|r| r.cos_theta1.unwrap().abs()).collect();
        for w in cosines.windows(2) {
            assert!(w[1] >= w[0] - 1e-12);
        }
    }

    #[test]
    fn diagnostics_identical_iterates() {
        let m = DenseSymMatrix::diagonal(&[2.0, 1.0]);
        let x = vec![0.3, 0.4];
        let rec = diagnostics(4, &x, &x, &m, None);
        assert_eq!(rec.eps_u, Some(0.0));
        assert_eq!(rec.eps_sigma, Some(0.0));
        assert_eq!(rec.t, 4);
        assert!(rec.cos_theta1.is_none());
    }

    #[test]
    fn diagnostics_at_optimum_with_reference() {
        let (m, _) = rank1_matrix(6, 2.0, 23);
        let spec = jacobi_eigh(&m).unwrap();
        let x = vec::scaled(spec.top_vector(), spec.top_value().sqrt());
        let rec = diagnostics(1, &x, &x, &m, Some(&spec));
        assert!(rec.heron_eps.unwrap().abs() <= 1e-12);
        assert!((rec.cos_theta1.unwrap().abs() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn attraction_constant_examples() {
        // Maximal alignment with flat spectrum: a = 1.
        let spec = Spectrum {
            values: vec![1.0, 1.0],
            vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let c = attraction_constants(&[1.0, 0.0], &spec, 0.5).unwrap();
        assert!((c.a - 1.0).abs() < 1e-15);

        // ||x0|| = sqrt(sigma1): the entry-time log is negative, clamped to 1.
        assert_eq!(c.tau, 1);

        // cos = 0.5, sigma_d / sigma1 = 0.01 -> a = 0.5.
        let spec = Spectrum {
            values: vec![1.0, 0.01],
            vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        let s = 3.0f64.sqrt() / 2.0;
        let c = attraction_constants(&[0.5, s], &spec, 0.5).unwrap();
        assert!((c.a - 0.5).abs() < 1e-12);
        assert!(c.b >= 2.0);

        // Non-positive tail is rejected.
        let spec = Spectrum {
            values: vec![1.0, 0.0],
            vectors: vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        };
        assert!(matches!(
            attraction_constants(&[1.0, 0.0], &spec, 0.5),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            eta: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            eps: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            max_iter: 1,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
