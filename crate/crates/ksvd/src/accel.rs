//! Accelerated variants of the adaptive-step gradient iteration: a
//! two-sequence Nesterov scheme with estimate-sequence parameters, and the
//! simpler momentum iteration (Polyak heavy-ball or Nesterov look-ahead)
//! that needs only one extra stored iterate.

use crate::error::{Error, Result};
use crate::linalg::{matvec, LinearOperator, Spectrum};
use crate::linalg::vec;
use crate::rank1::{
    diagnostics, gd_update, random_init, should_stop, step_changes, Rank1Result, TraceRecord,
};

/// Configuration of the two-sequence Nesterov scheme.
///
/// The mixing weight is `alpha / (1 + alpha)` with `alpha = sqrt(mu / 2L)`,
/// `L = 9 sigma1_est / 2`. When `sigma1_est` is absent it is refreshed every
/// step as `||x_t||^2`, the same self-estimate the preconditioner uses; when
/// `mu` is absent a conservative `0.05 sigma1_est` is used (any value below
/// the true strong-convexity constant keeps the local guarantee, at a slower
/// rate). A fixed `rho` overrides both through `alpha = 1 / sqrt(rho)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NesterovConfig {
    pub eta: f64,
    /// Strong-convexity estimate; must be positive when set.
    pub mu: Option<f64>,
    /// Fixed condition ratio; must exceed 1 when set.
    pub rho: Option<f64>,
    /// Fixed top-eigenvalue estimate used for `L`; refreshed from the
    /// iterate when absent.
    pub sigma1_est: Option<f64>,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for NesterovConfig {
    fn default() -> Self {
        Self {
            eta: 1.0 / 6.0,
            mu: None,
            rho: None,
            sigma1_est: None,
            eps: 1e-8,
            max_iter: 500_000,
            seed: 0,
        }
    }
}

impl NesterovConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eta.is_nan() || self.eta <= 0.0 {
            return Err(Error::InvalidConfig("eta must be positive".into()));
        }
        if let Some(mu) = self.mu {
            if mu.is_nan() || mu <= 0.0 {
                return Err(Error::InvalidConfig("mu must be positive".into()));
            }
        }
        if let Some(rho) = self.rho {
            if rho.is_nan() || rho <= 1.0 {
                return Err(Error::InvalidConfig("rho must exceed 1".into()));
            }
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

    fn alpha(&self, x: &[f64]) -> (f64, f64) {
        let s1 = self.sigma1_est.unwrap_or_else(|| vec::norm2(x));
        let mu = self.mu.unwrap_or(0.05 * s1);
        // 2L = 9 sigma1.
        let alpha = match self.rho {
            Some(rho) => rho.sqrt().recip(),
            None => (mu / (9.0 * s1)).sqrt(),
        };
        (alpha, mu)
    }
}

/// One step of the two-sequence scheme:
/// `y = x + (alpha / (1 + alpha)) (v - x)`,
/// `x' = y - (eta / ||y||^2) grad g(y)`,
/// `v' = (1 - alpha) v + alpha (y - grad g(y) / mu)`.
pub fn nesterov_step(
    x: &[f64],
    v: &[f64],
    m: &dyn LinearOperator,
    cfg: &NesterovConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != v.len() {
        return Err(Error::DimMismatch {
            expected: x.len(),
            got: v.len(),
        });
    }
    let (alpha, mu) = cfg.alpha(x);
    let w = alpha / (1.0 + alpha);
    let y: Vec<f64> = x.iter().zip(v).map(|(xi, vi)| xi + w * (vi - xi)).collect();
    let ny2 = vec::norm2(&y);
    if ny2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let my = matvec(m, &y)?;
    let x_next = gd_update(&y, &my, cfg.eta, ny2);
    let gy: Vec<f64> = y.iter().zip(&my).map(|(yi, mi)| ny2 * yi - mi).collect();
    let v_next: Vec<f64> = v
        .iter()
        .zip(&y)
        .zip(&gy)
        .map(|((vi, yi), gi)| (1.0 - alpha) * vi + alpha * (yi - gi / mu))
        .collect();
    Ok((x_next, v_next))
}

/// Runs the two-sequence scheme from `x0 = v0 = random_init`, stopping by
/// the same two-sided rule as the plain solver. The local theory wants the
/// start near a global minimizer; in practice the random start converges as
/// well, so no ball membership is enforced.
pub fn solve_nesterov(
    m: &dyn LinearOperator,
    cfg: &NesterovConfig,
    reference: Option<&Spectrum>,
    record_trace: bool,
) -> Result<Rank1Result> {
    cfg.validate()?;
    let mut x = random_init(m, cfg.seed)?;
    let mut v = x.clone();
    let mut trace = if record_trace {
        Some(vec![TraceRecord::initial(&x, m, reference)])
    } else {
        None
    };

    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=cfg.max_iter {
        let (x_next, v_next) = nesterov_step(&x, &v, m, cfg)?;
        let norm_next = vec::norm(&x_next);
        if norm_next == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let (eps_u, eps_sigma) = step_changes(&x_next, norm_next, &x, vec::norm(&x));
        if let Some(tr) = trace.as_mut() {
            tr.push(diagnostics(t, &x_next, &x, m, reference));
        }
        x = x_next;
        v = v_next;
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

/// Momentum flavor: heavy-ball extrapolates only the update, look-ahead
/// also evaluates the gradient at the extrapolated point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumMode {
    Polyak,
    Nesterov,
}

/// Configuration of the single-sequence momentum iteration
/// `y = x + alpha (x - x_prev)`,
/// `x' = x + beta (x - x_prev) - (eta / ||y||^2) grad g(y)`,
/// with `alpha = 0` (Polyak) or `alpha = beta` (Nesterov).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentumConfig {
    /// Momentum coefficient in `[0, 1)`.
    pub beta: f64,
    pub mode: MomentumMode,
    pub eta: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Number of plain-gradient iterations before momentum activates;
    /// honored in Polyak mode only.
    pub warmup: usize,
}

impl MomentumConfig {
    /// Heavy-ball configuration with the stability warmup `ceil(100 beta)`.
    pub fn polyak(beta: f64) -> Self {
        Self {
            beta,
            mode: MomentumMode::Polyak,
            eta: 0.5,
            eps: 1e-8,
            max_iter: 500_000,
            seed: 0,
            warmup: (100.0 * beta).ceil() as usize,
        }
    }

    /// Look-ahead configuration; robust from the first iteration, so no
    /// warmup.
    pub fn nesterov(beta: f64) -> Self {
        Self {
            beta,
            mode: MomentumMode::Nesterov,
            eta: 0.5,
            eps: 1e-8,
            max_iter: 500_000,
            seed: 0,
            warmup: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::InvalidConfig("beta must be in [0, 1)".into()));
        }
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

    fn alpha(&self) -> f64 {
        match self.mode {
            MomentumMode::Polyak => 0.0,
            MomentumMode::Nesterov => self.beta,
        }
    }
}

/// One momentum step. Computed as
/// `x' = gd_update(y) + (beta - alpha)(x - x_prev)` — algebraically equal to
/// the displayed update and bit-identical to plain gradient descent when
/// `beta = 0`.
pub fn momentum_step(
    x: &[f64],
    x_prev: &[f64],
    m: &dyn LinearOperator,
    cfg: &MomentumConfig,
) -> Result<Vec<f64>> {
    if x.len() != x_prev.len() {
        return Err(Error::DimMismatch {
            expected: x.len(),
            got: x_prev.len(),
        });
    }
    let alpha = cfg.alpha();
    let y: Vec<f64> = x
        .iter()
        .zip(x_prev)
        .map(|(xi, pi)| xi + alpha * (xi - pi))
        .collect();
    let ny2 = vec::norm2(&y);
    if ny2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let my = matvec(m, &y)?;
    let base = gd_update(&y, &my, cfg.eta, ny2);
    let carry = cfg.beta - alpha;
    Ok(base
        .iter()
        .zip(x.iter().zip(x_prev))
        .map(|(bi, (xi, pi))| bi + carry * (xi - pi))
        .collect())
}

/// Full momentum solve. During the Polyak warmup the momentum term is
/// suppressed (plain gradient steps). Aborts with `diverged = true` when
/// `||x_t||` exceeds `1e8 ||x0||`, which poorly chosen `beta` can cause.
pub fn solve_momentum(
    m: &dyn LinearOperator,
    cfg: &MomentumConfig,
    reference: Option<&Spectrum>,
    record_trace: bool,
) -> Result<Rank1Result> {
    cfg.validate()?;
    let x0 = random_init(m, cfg.seed)?;
    let blowup = 1e8 * vec::norm(&x0);
    let mut x_prev = x0.clone();
    let mut x = x0;
    let mut trace = if record_trace {
        Some(vec![TraceRecord::initial(&x, m, reference)])
    } else {
        None
    };

    let suppressed = MomentumConfig {
        beta: 0.0,
        warmup: 0,
        ..*cfg
    };

    let mut iterations = 0;
    let mut converged = false;
    let mut diverged = false;
    for t in 1..=cfg.max_iter {
        let step_cfg = if cfg.mode == MomentumMode::Polyak && t <= cfg.warmup {
            &suppressed
        } else {
            cfg
        };
        let x_next = momentum_step(&x, &x_prev, m, step_cfg)?;
        let norm_next = vec::norm(&x_next);
        if norm_next == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let (eps_u, eps_sigma) = step_changes(&x_next, norm_next, &x, vec::norm(&x));
        if let Some(tr) = trace.as_mut() {
            tr.push(diagnostics(t, &x_next, &x, m, reference));
        }
        x_prev = x;
        x = x_next;
        iterations = t;
        if norm_next > blowup {
            diverged = true;
            break;
        }
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
        diverged,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{DenseSymMatrix, jacobi_eigh};
    use crate::rank1::{gd_step, solve_rank1, SolverConfig};

    #[test]
    fn nesterov_step_fixed_point() {
        let u = vec::normalized(&[1.0, 2.0, -1.0]);
        let sigma = 2.0;
        let m = DenseSymMatrix::from_outer_sum(3, &[(sigma, u.clone())]).unwrap();
        let x = vec::scaled(&u, sigma.sqrt());
        let cfg = NesterovConfig::default();
        let (x2, v2) = nesterov_step(&x, &x, &m, &cfg).unwrap();
        for ((a, b), c) in x2.iter().zip(&v2).zip(&x) {
            assert!((a - c).abs() <= 1e-12 * (1.0 + c.abs()));
            assert!((b - c).abs() <= 1e-12 * (1.0 + c.abs()));
        }
    }

    #[test]
    fn nesterov_alpha_zero_degenerates_to_gd() {
        let m = DenseSymMatrix::diagonal(&[2.0, 1.0]);
        let cfg = NesterovConfig {
            rho: Some(f64::INFINITY),
            ..Default::default()
        };
        let x = vec![0.4, 0.7];
        let v = vec![-1.0, 2.0];
        let (x2, v2) = nesterov_step(&x, &v, &m, &cfg).unwrap();
        assert_eq!(v2, v);
        assert_eq!(x2, gd_step(&x, &m, cfg.eta).unwrap());
    }

    #[test]
    fn nesterov_two_steps_match_plain_transcription() {
        // Independent re-implementation of the update equations, evaluated
        // verbatim, as the oracle for two steps on diag(2, 1).
        let m = DenseSymMatrix::diagonal(&[2.0, 1.0]);
        let cfg = NesterovConfig {
            mu: Some(0.2),
            sigma1_est: Some(2.0),
            ..Default::default()
        };
        let x0 = random_init(&m, 31).unwrap();
        let mut x = x0.clone();
        let mut v = x0.clone();
        for _ in 0..2 {
            let (xn, vn) = nesterov_step(&x, &v, &m, &cfg).unwrap();
            x = xn;
            v = vn;
        }

        let alpha = (0.2f64 / (9.0 * 2.0)).sqrt();
        let w = alpha / (1.0 + alpha);
        let mut ex = x0.clone();
        let mut ev = x0;
        for _ in 0..2 {
            let y: Vec<f64> = ex.iter().zip(&ev).map(|(a, b)| a + w * (b - a)).collect();
            let ny2 = vec::norm2(&y);
            let gy: Vec<f64> = (0..2)
                .map(|i| ny2 * y[i] - m.get(i, 0) * y[0] - m.get(i, 1) * y[1])
                .collect();
            let xn: Vec<f64> = (0..2).map(|i| y[i] - cfg.eta / ny2 * gy[i]).collect();
            let vn: Vec<f64> = (0..2)
                .map(|i| (1.0 - alpha) * ev[i] + alpha * (y[i] - gy[i] / 0.2))
                .collect();
            ex = xn;
            ev = vn;
        }
        for (a, b) in x.iter().zip(&ex) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
        for (a, b) in v.iter().zip(&ev) {
            assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn solve_nesterov_rank1_exact() {
        let u = vec::normalized(&[0.2, 0.5, -0.8, 0.1]);
        let m = DenseSymMatrix::from_outer_sum(4, &[(1.7, u.clone())]).unwrap();
        // The scheme contracts linearly at eta = 1/6, so 1e-8 accuracy
        // needs a stopping tolerance below it.
        let cfg = NesterovConfig {
            eps: 1e-10,
            ..Default::default()
        };
        let res = solve_nesterov(&m, &cfg, None, false).unwrap();
        assert!(res.converged);
        assert!((res.sigma_hat - 1.7).abs() <= 1e-8);
        assert!(vec::sign_agnostic_distance(&res.u_hat, &u) <= 1e-6);
    }

    #[test]
    fn solve_nesterov_rank2_near_start_converges_tightly() {
        let m = DenseSymMatrix::diagonal(&[1.0, 0.9]);
        let spec = jacobi_eigh(&m).unwrap();
        let cfg = NesterovConfig {
            mu: Some(0.025),
            sigma1_est: Some(1.0),
            eps: 1e-12,
            ..Default::default()
        };
        let res = solve_nesterov(&m, &cfg, Some(&spec), false).unwrap();
        assert!(res.converged);
        let x = vec::scaled(&res.u_hat, res.sigma_hat.sqrt());
        let star = vec::scaled(spec.top_vector(), spec.top_value().sqrt());
        assert!(vec::sign_agnostic_distance(&x, &star) <= 1e-8);
    }

    #[test]
    fn momentum_step_beta_zero_is_gd_bitwise() {
        let m = DenseSymMatrix::diagonal(&[3.0, 1.0, 0.5]);
        let x = vec![0.3, -0.8, 0.2];
        let prev = vec![0.1, -0.9, 0.4];
        for mode in [MomentumMode::Polyak, MomentumMode::Nesterov] {
            let cfg = MomentumConfig {
                beta: 0.0,
                mode,
                ..MomentumConfig::nesterov(0.0)
            };
            let got = momentum_step(&x, &prev, &m, &cfg).unwrap();
            assert_eq!(got, gd_step(&x, &m, cfg.eta).unwrap());
        }
    }

    #[test]
    fn momentum_step_stationary_history_is_plain_step() {
        let m = DenseSymMatrix::diagonal(&[2.0, 1.0]);
        let x = vec![0.5, 0.5];
        let cfg = MomentumConfig::nesterov(0.6);
        let got = momentum_step(&x, &x, &m, &cfg).unwrap();
        assert_eq!(got, gd_step(&x, &m, cfg.eta).unwrap());
    }

    #[test]
    fn momentum_step_hand_example() {
        // Nesterov mode on diag(4, 1): y = x + 0.5 (x - x_prev), then the
        // displayed two-line update evaluated by hand.
        let m = DenseSymMatrix::diagonal(&[4.0, 1.0]);
        let cfg = MomentumConfig::nesterov(0.5);
        let x = vec![1.0, 1.0];
        let prev = vec![0.9, 1.1];
        let got = momentum_step(&x, &prev, &m, &cfg).unwrap();

        let y = [1.05, 0.95];
        let ny2 = y[0] * y[0] + y[1] * y[1];
        let gy = [ny2 * y[0] - 4.0 * y[0], ny2 * y[1] - y[1]];
        let want = [
            x[0] + 0.5 * (x[0] - prev[0]) - 0.5 / ny2 * gy[0],
            x[1] + 0.5 * (x[1] - prev[1]) - 0.5 / ny2 * gy[1],
        ];
        for (a, b) in got.iter().zip(&want) {
            assert!((a - b).abs() <= 1e-15 * (1.0 + b.abs()), "{a} vs {b}");
        }
    }

    #[test]
    fn momentum_beta_zero_solve_matches_gd_bitwise() {
        let diag: Vec<f64> = (0..10).map(|i| 1.5 / (1.0 + i as f64)).collect();
        let m = DenseSymMatrix::diagonal(&diag);
        let scfg = SolverConfig::default().with_seed(7);
        let gd = solve_rank1(&m, &scfg, None, true).unwrap();
        for mode in [MomentumMode::Polyak, MomentumMode::Nesterov] {
            let mcfg = MomentumConfig {
                beta: 0.0,
                mode,
                ..MomentumConfig::nesterov(0.0)
            }
            .with_seed(7);
            let mm = solve_momentum(&m, &mcfg, None, true).unwrap();
            assert_eq!(mm.iterations, gd.iterations);
            assert_eq!(mm.sigma_hat.to_bits(), gd.sigma_hat.to_bits());
            let ta = gd.trace.as_ref().unwrap();
            let tb = mm.trace.as_ref().unwrap();
            assert_eq!(ta.len(), tb.len());
            for (ra, rb) in ta.iter().zip(tb) {
                assert_eq!(ra.norm_x.to_bits(), rb.norm_x.to_bits());
            }
        }
    }

    #[test]
    fn momentum_converges_on_small_gap() {
        let m = DenseSymMatrix::diagonal(&[1.0, 0.95]);
        let cfg = MomentumConfig::nesterov(0.8).with_seed(4);
        let res = solve_momentum(&m, &cfg, None, false).unwrap();
        assert!(res.converged);
        assert!((res.sigma_hat - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn momentum_divergence_guard_trips() {
        // A (nonlinear) blowup map exercises the norm guard: each
        // application scales by a factor that grows with the iterate.
        struct Blowup;
        impl LinearOperator for Blowup {
            fn dim(&self) -> usize {
                2
            }
            fn apply(&self, v: &[f64]) -> Vec<f64> {
                let s = 1e6 * vec::norm2(v).max(1.0);
                vec::scaled(v, s)
            }
        }
        let cfg = MomentumConfig::polyak(0.9).with_seed(1);
        let res = solve_momentum(&Blowup, &cfg, None, false).unwrap();
        assert!(res.diverged);
        assert!(!res.converged);
    }
}
