//! The invariant suite: every analytical property the solvers are supposed
//! to satisfy, checked numerically on generated instances and reported as
//! observed-vs-bound pairs. Exposed both to the CLI (`verify` subcommand)
//! and to integration tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::accel::{
    nesterov_step, solve_momentum, solve_nesterov, MomentumConfig, MomentumMode,
    NesterovConfig,
};
use crate::driver::{recovery_errors, solve_ksvd, AsymStrategy, Method, solve_asymmetric};
use crate::error::Result;
use crate::linalg::{
    densify, jacobi_eigh, matvec, Deflated, DenseMatrix, DenseSymMatrix, LinearOperator, Spectrum,
};
use crate::linalg::vec;
use crate::matgen::{decay_rank, generate, Family, GeneratorSpec};
use crate::objective::{
    curvature_bounds, error_decomposition, g_value, grad_g, hessian_apply,
    outer_error_decomposition,
};
use crate::power::solve_power;
use crate::rank1::{
    attraction_constants, gd_step, random_init, solve_rank1, SolverConfig, TraceRecord,
};

/// Suite size: `Fast` trims trial counts and instance sizes to stay well
/// under a minute; `Full` runs everything.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyLevel {
    Fast,
    Full,
}

/// One named check with the worst observed value against its bound.
/// `passed` iff `observed <= bound`.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub bound: f64,
    pub detail: String,
}

impl CheckResult {
    pub fn new(name: &str, observed: f64, bound: f64, detail: impl Into<String>) -> Self {
        Self {
            name: name.to_string(),
            passed: observed <= bound,
            observed,
            bound,
            detail: detail.into(),
        }
    }
}

/// A gradient-descent run with all iterates retained, for checks that need
/// the actual vectors rather than trace scalars.
pub struct GdRun {
    pub x0: Vec<f64>,
    pub iterates: Vec<Vec<f64>>,
    pub trace: Vec<TraceRecord>,
}

/// Reruns the plain solver loop, keeping every iterate. Mirrors
/// `solve_rank1` (same init, update, and stopping rule).
pub fn manual_gd_run(
    m: &dyn LinearOperator,
    truth: Option<&Spectrum>,
    cfg: &SolverConfig,
) -> Result<GdRun> {
    let x0 = random_init(m, cfg.seed)?;
    let mut iterates = vec![x0.clone()];
    let mut trace = vec![TraceRecord::initial(&x0, m, truth)];
    let mut x = x0.clone();
    for t in 1..=cfg.max_iter {
        let x_next = gd_step(&x, m, cfg.eta)?;
        let rec = crate::rank1::diagnostics(t, &x_next, &x, m, truth);
        let stop = t >= 2
            && rec.eps_u.unwrap() < cfg.eps
            && rec.eps_sigma.unwrap() < cfg.eps;
        iterates.push(x_next.clone());
        trace.push(rec);
        x = x_next;
        if stop {
            break;
        }
    }
    Ok(GdRun { x0, iterates, trace })
}

/// `|cos theta_1,t|` must be non-decreasing along a trace (within 1e-12).
/// Public so a corrupted trace can be fed in as a negative control.
pub fn check_monotone_cosine(trace: &[TraceRecord], label: &str) -> CheckResult {
    let mut worst = f64::NEG_INFINITY;
    let mut prev: Option<f64> = None;
    for rec in trace {
        if let Some(c) = rec.cos_theta1 {
            let c = c.abs();
            if let Some(p) = prev {
                worst = worst.max(p - c);
            }
            prev = Some(c);
        }
    }
    if !worst.is_finite() {
        worst = 0.0;
    }
    CheckResult::new(
        "monotone-cosine",
        worst,
        1e-12,
        format!("{label}: max |cos| decrease across consecutive iterates"),
    )
}

/// Norm band: `||x_t|| >= a sqrt(sigma1)` for `t > 1` and
/// `||x_t|| <= b sqrt(sigma1)` for `t > tau`.
pub fn check_norm_bounds(run: &GdRun, truth: &Spectrum, eta: f64, label: &str) -> Vec<CheckResult> {
    let c = match attraction_constants(&run.x0, truth, eta) {
        Ok(c) => c,
        Err(e) => {
            return vec![CheckResult::new(
                "norm-band-lower",
                f64::INFINITY,
                1e-10,
                format!("{label}: constants unavailable: {e}"),
            )]
        }
    };
    let s1 = truth.top_value().sqrt();
    let mut lower_violation: f64 = 0.0;
    let mut upper_violation: f64 = 0.0;
    for rec in &run.trace {
        if rec.t > 1 {
            lower_violation = lower_violation.max(c.a * s1 - rec.norm_x);
        }
        if rec.t > c.tau {
            upper_violation = upper_violation.max(rec.norm_x - c.b * s1);
        }
    }
    vec![
        CheckResult::new(
            "norm-band-lower",
            lower_violation,
            1e-10,
            format!("{label}: a = {:.4}, tau = {}", c.a, c.tau),
        ),
        CheckResult::new(
            "norm-band-upper",
            upper_violation,
            1e-10,
            format!("{label}: b = {:.4}, tau = {}", c.b, c.tau),
        ),
    ]
}

/// Per-direction sign of `x_t . u_i` never flips (values within
/// `1e-12 ||x_t||` of zero are sign-compatible).
pub fn check_sign_stability(run: &GdRun, truth: &Spectrum, label: &str) -> CheckResult {
    let mut worst: f64 = 0.0;
    for u in &truth.vectors {
        let mut sign = 0.0f64;
        for x in &run.iterates {
            let d = vec::dot(x, u);
            let floor = 1e-12 * vec::norm(x);
            if d.abs() <= floor {
                continue;
            }
            if sign == 0.0 {
                sign = d.signum();
            } else if d.signum() != sign {
                worst = worst.max(d.abs() / vec::norm(x));
            }
        }
    }
    CheckResult::new(
        "sign-stability",
        worst,
        0.0,
        format!("{label}: largest normalized magnitude of a sign flip"),
    )
}

/// Alignment at a linear rate: for `t >= tau`,
/// `||x^ - u1|| ||x^ + u1|| <= 2 tan(theta_{1,tau}) rate^{t - tau} + 1e-10`
/// with `rate = 1 - eta gap / (((1-eta) b^2 + eta) sigma1)`.
///
/// The `tan(theta_{1,tau})` prefactor is required: telescoping the
/// per-direction ratio recursion leaves a `|cos theta_{1,tau+t}| /
/// |cos theta_{1,tau}| <= 1 / |cos theta_{1,tau}|` factor, so a start
/// aligned worse than 45 degrees genuinely exceeds a prefactor-1 bound.
pub fn check_alignment_rate(
    run: &GdRun,
    truth: &Spectrum,
    eta: f64,
    label: &str,
) -> CheckResult {
    if truth.len() < 2 || truth.values[0] - truth.values[1] <= 0.0 {
        return CheckResult::new("alignment-rate", 0.0, 1e-10, format!("{label}: skipped (no gap)"));
    }
    let c = match attraction_constants(&run.x0, truth, eta) {
        Ok(c) => c,
        Err(e) => {
            return CheckResult::new(
                "alignment-rate",
                f64::INFINITY,
                1e-10,
                format!("{label}: constants unavailable: {e}"),
            )
        }
    };
    let sigma1 = truth.values[0];
    let gap = sigma1 - truth.values[1];
    let rate = 1.0 - eta * gap / (((1.0 - eta) * c.b * c.b + eta) * sigma1);
    let u1 = truth.top_vector();
    if run.iterates.len() <= c.tau {
        return CheckResult::new(
            "alignment-rate",
            0.0,
            1e-10,
            format!("{label}: run ended before tau = {}", c.tau),
        );
    }
    // tan(theta_{1,tau}) computed from the orthogonal complement, which is
    // stable where 1 - cos^2 would cancel.
    let x_tau = vec::normalized(&run.iterates[c.tau]);
    let cos_tau = vec::dot(&x_tau, u1);
    let sin_tau = vec::norm(&vec::add_scaled(&x_tau, -cos_tau, u1));
    let prefactor = if cos_tau.abs() > 0.0 {
        sin_tau / cos_tau.abs()
    } else {
        f64::INFINITY
    };
    let mut worst: f64 = f64::NEG_INFINITY;
    for (t, x) in run.iterates.iter().enumerate() {
        if t < c.tau {
            continue;
        }
        let xh = vec::normalized(x);
        let product = vec::norm(&vec::sub(&xh, u1)) * vec::norm(&vec::add_scaled(&xh, 1.0, u1));
        let bound = 2.0 * prefactor.max(1.0) * rate.powi((t - c.tau) as i32);
        worst = worst.max(product - bound);
    }
    if !worst.is_finite() {
        worst = 0.0;
    }
    CheckResult::new(
        "alignment-rate",
        worst,
        1e-10,
        format!(
            "{label}: rate = {rate:.6}, tau = {}, tan prefactor = {prefactor:.3}",
            c.tau
        ),
    )
}

/// Saddle avoidance: whenever an iterate sits near a saddle shell, the
/// gradient norm stays above the floor
/// `min(a^2 sigma1, ||x0||^2) (gap^2 / 4) cos^2(theta_{1,0})`.
pub fn check_saddle_floor(run: &GdRun, truth: &Spectrum, eta: f64, label: &str) -> CheckResult {
    if truth.len() < 2 {
        return CheckResult::new("saddle-floor", 0.0, 1e-10, format!("{label}: skipped (rank 1)"));
    }
    let sigma1 = truth.values[0];
    let gap = sigma1 - truth.values[1];
    if gap <= 0.0 {
        return CheckResult::new("saddle-floor", 0.0, 1e-10, format!("{label}: skipped (no gap)"));
    }
    let c = match attraction_constants(&run.x0, truth, eta) {
        Ok(c) => c,
        Err(_) => {
            return CheckResult::new("saddle-floor", 0.0, 1e-10, format!("{label}: skipped"))
        }
    };
    let norm_x0 = vec::norm(&run.x0);
    let cos0 = (vec::dot(&run.x0, truth.top_vector()) / norm_x0).abs();
    let floor = (c.a * c.a * sigma1).min(norm_x0 * norm_x0) * (gap * gap / 4.0) * cos0 * cos0;

    let mut worst: f64 = 0.0;
    let mut triggered = 0usize;
    for rec in &run.trace {
        let n2 = rec.norm_x * rec.norm_x;
        let near_shell = n2 <= gap / 2.0
            || truth.values[1..]
                .iter()
                .any(|s| (n2 - s).abs() <= gap / 2.0);
        if near_shell {
            triggered += 1;
            worst = worst.max(floor - rec.grad_norm * rec.grad_norm);
        }
    }
    CheckResult::new(
        "saddle-floor",
        worst,
        1e-10,
        format!("{label}: {triggered} iterates inside a saddle shell, floor = {floor:.3e}"),
    )
}

/// Heron behavior on exact rank-1 instances: chain bound
/// `0 < eps_{t+1} <= min(eps_t^2, eps_t)/2 + 1e-14` and the exact recursion
/// `eps_{t+1} = eps_t^2 / (2 (eps_t + 1))` to 1e-13.
///
/// Below `eps ~ 1e-7` the squared residual drops under the double-precision
/// noise floor of the norm computation, so strict positivity is only
/// asserted while `eps_t >= 1e-6`.
pub fn check_heron(trace: &[TraceRecord], label: &str) -> Vec<CheckResult> {
    let eps: Vec<f64> = trace.iter().filter_map(|r| r.heron_eps).collect();
    let mut chain_violation: f64 = f64::NEG_INFINITY;
    let mut positivity_violation: f64 = 0.0;
    let mut identity_violation: f64 = 0.0;
    for (t, w) in eps.windows(2).enumerate() {
        let (e0, e1) = (w[0], w[1]);
        // Chain starts from t >= 1 (e0 is eps_t for t >= 1).
        if t >= 1 {
            chain_violation = chain_violation.max(e1 - (e0 * e0).min(e0) / 2.0 - 1e-14);
            if e0 >= 1e-6 && e1 <= 0.0 {
                positivity_violation = positivity_violation.max(-e1 + f64::MIN_POSITIVE);
            }
        }
        identity_violation = identity_violation.max((e1 - e0 * e0 / (2.0 * (e0 + 1.0))).abs());
    }
    if !chain_violation.is_finite() {
        chain_violation = 0.0;
    }
    vec![
        CheckResult::new(
            "heron-chain",
            chain_violation.max(positivity_violation),
            0.0,
            format!("{label}: quadratic-contraction chain over {} iterates", eps.len()),
        ),
        CheckResult::new(
            "heron-identity",
            identity_violation,
            1e-13,
            format!("{label}: exact one-step recursion residual"),
        ),
    ]
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        if vec::norm(&v) > 1e-6 {
            return vec::normalized(&v);
        }
    }
}

/// Runs the whole suite.
pub fn run_suite(level: VerifyLevel, seed: u64) -> Vec<CheckResult> {
    let full = level == VerifyLevel::Full;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let mut out = Vec::new();

    // --- operator symmetry as a bilinear form ---
    {
        let trials = if full { 100 } else { 30 };
        let mut worst: f64 = 0.0;
        for i in 0..trials {
            let (m, _) = generate(&GeneratorSpec {
                n: 24,
                family: Family::LinDecay,
                seed: seed.wrapping_add(i),
            })
            .unwrap();
            let v = random_unit(&mut rng, 24);
            let w = random_unit(&mut rng, 24);
            let av = matvec(&m, &v).unwrap();
            let aw = matvec(&m, &w).unwrap();
            let lhs = vec::dot(&av, &w);
            let rhs = vec::dot(&v, &aw);
            worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        }
        out.push(CheckResult::new(
            "operator-symmetry",
            worst,
            1e-10,
            format!("{trials} random bilinear-form probes"),
        ));
    }

    // --- oracle on generated PSD instances ---
    {
        let instances = if full { 10 } else { 4 };
        let mut min_eig: f64 = 0.0;
        let mut orth: f64 = 0.0;
        let mut recon: f64 = 0.0;
        for i in 0..instances {
            let fam = match i % 3 {
                0 => Family::ExpDecay,
                1 => Family::PolyDecay,
                _ => Family::LinDecay,
            };
            let (m, _) = generate(&GeneratorSpec {
                n: 28,
                family: fam,
                seed: seed.wrapping_add(100 + i),
            })
            .unwrap();
            let s = jacobi_eigh(&m).unwrap();
            min_eig = min_eig.max(-s.values.last().copied().unwrap_or(0.0));
            orth = orth.max(s.orthonormality_residual());
            let pairs: Vec<(f64, Vec<f64>)> = s
                .values
                .iter()
                .cloned()
                .zip(s.vectors.iter().cloned())
                .collect();
            let rebuilt = DenseSymMatrix::from_outer_sum(28, &pairs).unwrap();
            let mut err2 = 0.0;
            for r in 0..28 {
                for c in 0..28 {
                    let d = rebuilt.get(r, c) - m.get(r, c);
                    err2 += d * d;
                }
            }
            recon = recon.max(err2.sqrt() / m.frob_norm2().sqrt());
        }
        out.push(CheckResult::new(
            "oracle-eigenvalue-nonneg",
            min_eig,
            1e-10,
            format!("{instances} generated PSD instances"),
        ));
        out.push(CheckResult::new(
            "oracle-orthonormality",
            orth,
            1e-9,
            format!("{instances} generated PSD instances"),
        ));
        out.push(CheckResult::new(
            "oracle-reconstruction",
            recon,
            1e-10,
            format!("{instances} generated PSD instances, relative Frobenius"),
        ));
    }

    // --- deflation reproduces the trailing spectrum ---
    {
        let n = if full { 40 } else { 20 };
        let (m, _) = generate(&GeneratorSpec {
            n,
            family: Family::LinDecay,
            seed: seed.wrapping_add(200),
        })
        .unwrap();
        let s = jacobi_eigh(&m).unwrap();
        let mut worst: f64 = 0.0;
        for j in 1..=3usize {
            let pairs: Vec<(f64, Vec<f64>)> = (0..j)
                .map(|i| (s.values[i], s.vectors[i].clone()))
                .collect();
            let deflated = Deflated::new(&m, pairs).unwrap();
            let dense = densify(&deflated).unwrap();
            let ds = jacobi_eigh(&dense).unwrap();
            worst = worst.max((ds.values[0] - s.values[j]).abs());
        }
        out.push(CheckResult::new(
            "deflation-trailing-spectrum",
            worst,
            1e-9,
            format!("exact top-1..3 deflation on n = {n}"),
        ));
    }

    // --- gradient and Hessian against finite differences ---
    {
        let trials = if full { 100 } else { 30 };
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..trials {
            let n = 3 + (i as usize % 8);
            let (m, _) = generate(&GeneratorSpec {
                n: n.max(4),
                family: Family::PolyDecay,
                seed: seed.wrapping_add(300 + i),
            })
            .unwrap();
            let n = m.dim();
            let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let frob = m.frob_norm2();
            let grad = grad_g(&x, &m).unwrap();
            let scale = vec::norm(&grad).max(1.0);
            for j in 0..n {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fd = (g_value(&xp, &m, frob).unwrap() - g_value(&xm, &m, frob).unwrap())
                    / (2.0 * h);
                worst = worst.max((fd - grad[j]).abs() / scale);
            }
        }
        out.push(CheckResult::new(
            "gradient-finite-difference",
            worst,
            1e-6,
            format!("{trials} random instances, central differences h = 1e-6"),
        ));

        let trials = if full { 30 } else { 10 };
        let mut worst: f64 = 0.0;
        for i in 0..trials {
            let (m, _) = generate(&GeneratorSpec {
                n: 7,
                family: Family::LinDecay,
                seed: seed.wrapping_add(400 + i),
            })
            .unwrap();
            let x: Vec<f64> = (0..7).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let v = random_unit(&mut rng, 7);
            let hv = hessian_apply(&x, &m, &v).unwrap();
            let gp = grad_g(&vec::add_scaled(&x, h, &v), &m).unwrap();
            let gm = grad_g(&vec::add_scaled(&x, -h, &v), &m).unwrap();
            let scale = vec::norm(&hv).max(1.0);
            for j in 0..7 {
                let fd = (gp[j] - gm[j]) / (2.0 * h);
                worst = worst.max((fd - hv[j]).abs() / scale);
            }
        }
        out.push(CheckResult::new(
            "hessian-finite-difference",
            worst,
            1e-5,
            format!("{trials} random instances, directional differences"),
        ));
    }

    // --- critical points of g ---
    {
        let instances = if full { 6 } else { 3 };
        let mut worst: f64 = 0.0;
        for i in 0..instances {
            let (m, _) = generate(&GeneratorSpec {
                n: 10,
                family: Family::LinDecay,
                seed: seed.wrapping_add(500 + i),
            })
            .unwrap();
            let s = jacobi_eigh(&m).unwrap();
            let sigma1 = s.top_value();
            worst = worst.max(vec::norm(&grad_g(&[0.0; 10], &m).unwrap()) / sigma1);
            for (sig, u) in s.values.iter().zip(&s.vectors) {
                if *sig <= 1e-12 * sigma1 {
                    continue;
                }
                for sgn in [1.0, -1.0] {
                    let x = vec::scaled(u, sgn * sig.sqrt());
                    worst = worst.max(vec::norm(&grad_g(&x, &m).unwrap()) / sigma1);
                }
            }
        }
        out.push(CheckResult::new(
            "critical-points",
            worst,
            1e-10,
            format!("gradient norm / sigma1 at 0 and +-sqrt(sigma_i) u_i, {instances} instances"),
        ));
    }

    // --- curvature sandwich inside the attraction neighborhood ---
    {
        let (m, truth) = generate(&GeneratorSpec {
            n: 8,
            family: Family::Explicit {
                sigma: vec![1.0, 0.5, 0.3, 0.1],
            },
            seed: seed.wrapping_add(600),
        })
        .unwrap();
        let cb = curvature_bounds(truth.values[0], truth.values[1]).unwrap();
        let x_star = vec::scaled(truth.top_vector(), truth.values[0].sqrt());
        let mut worst: f64 = f64::NEG_INFINITY;
        for _ in 0..50 {
            let dir = random_unit(&mut rng, 8);
            let r: f64 = rng.random::<f64>() * cb.radius;
            let x = vec::add_scaled(&x_star, r, &dir);
            // Densify the Hessian action column by column.
            let h = DenseSymMatrix::from_fn(8, |i, j| {
                let mut e = vec![0.0; 8];
                e[j] = 1.0;
                hessian_apply(&x, &m, &e).unwrap()[i]
            })
            .unwrap();
            let hs = jacobi_eigh(&h).unwrap();
            let lmax = hs.values[0];
            let lmin = *hs.values.last().unwrap();
            worst = worst.max(cb.mu - lmin).max(lmax - cb.l);
        }
        out.push(CheckResult::new(
            "curvature-sandwich",
            worst,
            1e-9,
            format!("50 samples in radius {:.4} around the optimum", cb.radius),
        ));
    }

    // --- exact decomposition identities ---
    {
        let trials = if full { 1000 } else { 200 };
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let n = 2 + (rng.random::<f64>() * 8.0) as usize;
            let x: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            if vec::norm(&x) < 1e-6 || vec::norm(&y) < 1e-6 {
                continue;
            }
            let split = error_decomposition(&x, &y).unwrap();
            let direct = vec::norm2(&vec::sub(&x, &y));
            worst = worst.max((split.total - direct).abs() / (1.0 + direct));

            let rhs = outer_error_decomposition(&x, &y).unwrap();
            let mut outer = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let d = x[i] * x[j] - y[i] * y[j];
                    outer += d * d;
                }
            }
            worst = worst.max((rhs - outer).abs() / (1.0 + outer));
        }
        out.push(CheckResult::new(
            "decomposition-identities",
            worst,
            1e-12,
            format!("{trials} random pairs, both identities"),
        ));
    }

    // --- Heron behavior on exact rank-1 ---
    {
        let n = if full { 100 } else { 50 };
        let (m, truth) = generate(&GeneratorSpec {
            n,
            family: Family::Rank1 { sigma: 3.0 },
            seed: seed.wrapping_add(700),
        })
        .unwrap();
        let cfg = SolverConfig {
            seed: seed.wrapping_add(701),
            ..Default::default()
        };
        let res = solve_rank1(&m, &cfg, Some(&truth), true).unwrap();
        out.extend(check_heron(
            res.trace.as_ref().unwrap(),
            &format!("rank-1 n = {n}"),
        ));
    }

    // --- trace-based convergence properties on gapped instances ---
    {
        let specs: Vec<(GeneratorSpec, &str)> = vec![
            (
                GeneratorSpec {
                    n: 40,
                    family: Family::Rank2Gap { gap: 0.5 },
                    seed: seed.wrapping_add(800),
                },
                "rank-2 gap 0.5",
            ),
            (
                GeneratorSpec {
                    n: 40,
                    family: Family::Rank2Gap { gap: 0.1 },
                    seed: seed.wrapping_add(801),
                },
                "rank-2 gap 0.1",
            ),
            (
                GeneratorSpec {
                    n: if full { 64 } else { 32 },
                    family: Family::ExpDecay,
                    seed: seed.wrapping_add(802),
                },
                "exp decay",
            ),
        ];
        let mut merged: std::collections::BTreeMap<String, CheckResult> = Default::default();
        for (gspec, label) in &specs {
            let (m, truth) = generate(gspec).unwrap();
            let cfg = SolverConfig {
                seed: gspec.seed.wrapping_add(7),
                ..Default::default()
            };
            let run = manual_gd_run(&m, Some(&truth), &cfg).unwrap();
            let mut results = vec![check_monotone_cosine(&run.trace, label)];
            results.extend(check_norm_bounds(&run, &truth, cfg.eta, label));
            results.push(check_sign_stability(&run, &truth, label));
            results.push(check_alignment_rate(&run, &truth, cfg.eta, label));
            results.push(check_saddle_floor(&run, &truth, cfg.eta, label));
            for r in results {
                merged
                    .entry(r.name.clone())
                    .and_modify(|acc| {
                        if r.observed > acc.observed {
                            *acc = r.clone();
                        }
                    })
                    .or_insert(r);
            }
        }
        out.extend(merged.into_values());
    }

    // --- per-step descent of the two-sequence scheme near the optimum ---
    {
        let (m, truth) = generate(&GeneratorSpec {
            n: 12,
            family: Family::Explicit {
                sigma: vec![1.0, 0.9],
            },
            seed: seed.wrapping_add(900),
        })
        .unwrap();
        let cb = curvature_bounds(1.0, 0.9).unwrap();
        let cfg = NesterovConfig {
            mu: Some(cb.mu),
            sigma1_est: Some(1.0),
            ..Default::default()
        };
        let x_star = vec::scaled(truth.top_vector(), 1.0);
        let start_radius = 0.5 * cb.radius * (cb.mu / cb.l).sqrt();
        let dir = random_unit(&mut rng, 12);
        let mut x = vec::add_scaled(&x_star, 0.9 * start_radius, &dir);
        let mut v = x.clone();
        let frob = m.frob_norm2();
        let mut worst: f64 = f64::NEG_INFINITY;
        let mut checked = 0;
        for _ in 0..60 {
            // Recompute y exactly as the step does, to test the ball guard.
            let alpha = (cb.mu / (2.0 * cb.l)).sqrt();
            let w = alpha / (1.0 + alpha);
            let y: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + w * (b - a)).collect();
            let in_ball = vec::norm(&vec::sub(&y, &x_star))
                .min(vec::norm(&vec::add_scaled(&y, 1.0, &x_star)))
                <= cb.radius / 2.0;
            let (xn, vn) = nesterov_step(&x, &v, &m, &cfg).unwrap();
            if in_ball {
                let gy = vec::norm(&grad_g(&y, &m).unwrap());
                let g_after = g_value(&xn, &m, frob).unwrap();
                let g_at_y = g_value(&y, &m, frob).unwrap();
                worst = worst.max(g_after - (g_at_y - gy * gy / (18.0 * 1.0)));
                checked += 1;
            }
            x = xn;
            v = vn;
        }
        if !worst.is_finite() {
            worst = 0.0;
        }
        out.push(CheckResult::new(
            "accel-descent-step",
            worst,
            1e-10,
            format!("{checked} in-ball steps near the optimum"),
        ));
    }

    // --- zero-momentum reductions are bitwise exact ---
    {
        let (m, _) = generate(&GeneratorSpec {
            n: 16,
            family: Family::PolyDecay,
            seed: seed.wrapping_add(1000),
        })
        .unwrap();
        let scfg = SolverConfig {
            seed: seed.wrapping_add(1001),
            ..Default::default()
        };
        let gd = solve_rank1(&m, &scfg, None, true).unwrap();
        let mut worst: f64 = 0.0;
        for mode in [MomentumMode::Polyak, MomentumMode::Nesterov] {
            let mut mc = MomentumConfig::nesterov(0.0);
            mc.mode = mode;
            mc.seed = scfg.seed;
            let mm = solve_momentum(&m, &mc, None, true).unwrap();
            if mm.iterations != gd.iterations
                || mm.sigma_hat.to_bits() != gd.sigma_hat.to_bits()
            {
                worst = 1.0;
            }
            for (a, b) in gd
                .trace
                .as_ref()
                .unwrap()
                .iter()
                .zip(mm.trace.as_ref().unwrap())
            {
                if a.norm_x.to_bits() != b.norm_x.to_bits() {
                    worst = 1.0;
                }
            }
        }
        // alpha -> 0 limit of the two-sequence scheme at the gd step size.
        let ncfg = NesterovConfig {
            rho: Some(f64::INFINITY),
            eta: 0.5,
            seed: scfg.seed,
            ..Default::default()
        };
        let ngd = solve_nesterov(&m, &ncfg, None, true).unwrap();
        if ngd.sigma_hat.to_bits() != gd.sigma_hat.to_bits() {
            worst = 1.0;
        }
        out.push(CheckResult::new(
            "zero-momentum-reduction",
            worst,
            0.0,
            "beta = 0 and alpha = 0 limits reproduce plain gd bitwise",
        ));
    }

    // --- power iterates: unit norm and Rayleigh monotonicity ---
    {
        let (m, _) = generate(&GeneratorSpec {
            n: 32,
            family: Family::ExpDecay,
            seed: seed.wrapping_add(1100),
        })
        .unwrap();
        let cfg = SolverConfig {
            seed: seed.wrapping_add(1101),
            ..Default::default()
        };
        let res = solve_power(&m, &cfg, None, true).unwrap();
        let mut unit_violation: f64 = 0.0;
        for rec in res.trace.as_ref().unwrap() {
            unit_violation = unit_violation.max((rec.norm_x - 1.0).abs());
        }
        out.push(CheckResult::new(
            "power-unit-norm",
            unit_violation,
            1e-12,
            "all power iterates",
        ));

        let mut x = vec::normalized(&random_init(&m, cfg.seed).unwrap());
        let mut prev: Option<f64> = None;
        let mut worst: f64 = 0.0;
        for _ in 0..res.iterations {
            let mx = m.apply(&x);
            let r = vec::norm(&mx);
            if let Some(p) = prev {
                worst = worst.max(p - r);
            }
            prev = Some(r);
            if r == 0.0 {
                break;
            }
            x = vec::scaled(&mx, 1.0 / r);
        }
        out.push(CheckResult::new(
            "power-rayleigh-monotone",
            worst,
            1e-12,
            "||M x_t|| non-decreasing on PSD input",
        ));
    }

    // --- gd and power agree on the top pair ---
    {
        let mut sigma_err: f64 = 0.0;
        let mut vec_err: f64 = 0.0;
        let fams = [Family::ExpDecay, Family::PolyDecay, Family::LinDecay];
        for (i, fam) in fams.iter().enumerate() {
            let (m, truth) = generate(&GeneratorSpec {
                n: 50,
                family: fam.clone(),
                seed: seed.wrapping_add(1200 + i as u64),
            })
            .unwrap();
            let cfg = SolverConfig {
                seed: seed.wrapping_add(1210 + i as u64),
                ..Default::default()
            };
            let g = solve_rank1(&m, &cfg, None, false).unwrap();
            let p = solve_power(&m, &cfg, None, false).unwrap();
            sigma_err = sigma_err.max((g.sigma_hat - p.sigma_hat).abs() / truth.top_value());
            vec_err = vec_err.max(vec::sign_agnostic_distance(&g.u_hat, &p.u_hat));
        }
        out.push(CheckResult::new(
            "gd-power-sigma-agreement",
            sigma_err,
            1e-6,
            "top pair on three decay families, n = 50",
        ));
        out.push(CheckResult::new(
            "gd-power-vector-agreement",
            vec_err,
            1e-4,
            "top pair on three decay families, n = 50",
        ));
    }

    // --- deflation telescoping, densified ---
    {
        let (m, _) = generate(&GeneratorSpec {
            n: 20,
            family: Family::ExpDecay,
            seed: seed.wrapping_add(1300),
        })
        .unwrap();
        let method = Method::Gd(SolverConfig {
            seed: seed.wrapping_add(1301),
            ..Default::default()
        });
        let res = solve_ksvd(&m, 3, &method).unwrap();
        let pairs: Vec<(f64, Vec<f64>)> =
            res.pairs.iter().map(|p| (p.sigma, p.u.clone())).collect();
        let deflated = Deflated::new(&m, pairs.clone()).unwrap();
        let dense = densify(&deflated).unwrap();
        let explicit = DenseSymMatrix::from_outer_sum(20, &pairs).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            for j in 0..20 {
                worst = worst.max((dense.get(i, j) - (m.get(i, j) - explicit.get(i, j))).abs());
            }
        }
        out.push(CheckResult::new(
            "deflation-telescoping",
            worst,
            1e-12,
            "densified triple deflation on n = 20",
        ));
    }

    // --- top-k recovery contract on well-gapped spectra ---
    {
        let n = if full { 256 } else { 64 };
        let k = decay_rank(n);
        let sigma: Vec<f64> = (1..=k).map(|i| 0.78f64.powi(i as i32)).collect();
        let (m, truth) = generate(&GeneratorSpec {
            n,
            family: Family::Explicit { sigma },
            seed: seed.wrapping_add(1400),
        })
        .unwrap();
        let method = Method::Gd(SolverConfig {
            seed: seed.wrapping_add(1401),
            ..Default::default()
        });
        let res = solve_ksvd(&m, k, &method).unwrap();
        let mut worst: f64 = 0.0;
        for (i, pair) in res.pairs.iter().enumerate() {
            worst = worst.max((pair.sigma - truth.values[i]).abs() / truth.values[i]);
            worst = worst.max(vec::sign_agnostic_distance(&pair.u, &truth.vectors[i]));
        }
        out.push(CheckResult::new(
            "topk-recovery-contract",
            worst,
            1e-4,
            format!("n = {n}, k = {k}, relative gaps >= 0.1"),
        ));
    }

    // --- gram and dilation cross-check ---
    {
        let (rows, cols) = (12, 8);
        let mut nm = DenseMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                nm.set(i, j, rng.sample(StandardNormal));
            }
        }
        let method = Method::Gd(SolverConfig {
            eps: 1e-10,
            seed: seed.wrapping_add(1500),
            ..Default::default()
        });
        let g = solve_asymmetric(&nm, 3, &method, AsymStrategy::Gram).unwrap();
        let d = solve_asymmetric(&nm, 3, &method, AsymStrategy::Dilation).unwrap();
        let top = g.sigma_hat[0];
        let mut sigma_err: f64 = 0.0;
        let mut subspace_err: f64 = 0.0;
        for i in 0..3 {
            sigma_err = sigma_err.max((g.sigma_hat[i] - d.sigma_hat[i]).abs() / top);
            subspace_err = subspace_err.max(vec::sign_agnostic_distance(&g.u_hat[i], &d.u_hat[i]));
            subspace_err = subspace_err.max(vec::sign_agnostic_distance(
                g.v_hat[i].as_ref().unwrap(),
                d.v_hat[i].as_ref().unwrap(),
            ));
        }
        out.push(CheckResult::new(
            "gram-dilation-sigma",
            sigma_err,
            1e-6,
            "top-3 singular values on a random 12x8 matrix",
        ));
        out.push(CheckResult::new(
            "gram-dilation-vectors",
            subspace_err,
            1e-4,
            "left/right singular vectors, sign-agnostic",
        ));
    }

    // --- all solvers against the oracle ---
    {
        let instances = if full { 50 } else { 12 };
        let mut sigma_err: f64 = 0.0;
        let mut vec_err: f64 = 0.0;
        for i in 0..instances as u64 {
            let n = 6 + (i as usize * 7) % 15; // 6..=20
            let mut sigma = Vec::new();
            let mut s = 0.5 + rng.random::<f64>() * 2.0;
            for _ in 0..3.min(n - 1) {
                sigma.push(s);
                s *= 0.3 + rng.random::<f64>() * 0.5; // ratio in [0.3, 0.8)
            }
            let (m, _) = generate(&GeneratorSpec {
                n,
                family: Family::Explicit { sigma },
                seed: seed.wrapping_add(1600 + i),
            })
            .unwrap();
            let oracle = jacobi_eigh(&m).unwrap();
            let base = SolverConfig {
                seed: seed.wrapping_add(1700 + i),
                ..Default::default()
            };
            let methods = [
                Method::Gd(base),
                Method::Power(base),
                Method::Momentum(MomentumConfig::polyak(0.5).with_seed(base.seed)),
                Method::Momentum(MomentumConfig::nesterov(0.5).with_seed(base.seed)),
                Method::NesterovGeneral(NesterovConfig::default().with_seed(base.seed)),
            ];
            for method in methods {
                let res = method.solve(&m, None, false).unwrap();
                sigma_err = sigma_err
                    .max((res.sigma_hat - oracle.top_value()).abs() / oracle.top_value());
                vec_err =
                    vec_err.max(vec::sign_agnostic_distance(&res.u_hat, oracle.top_vector()));
            }
        }
        out.push(CheckResult::new(
            "solver-oracle-sigma",
            sigma_err,
            1e-6,
            format!("{instances} instances (n <= 20), all five solvers"),
        ));
        out.push(CheckResult::new(
            "solver-oracle-vector",
            vec_err,
            1e-4,
            format!("{instances} instances (n <= 20), all five solvers"),
        ));
    }

    // --- accelerated limit points on decay instances ---
    {
        let n = if full { 200 } else { 64 };
        let (m, truth) = generate(&GeneratorSpec {
            n,
            family: Family::PolyDecay,
            seed: seed.wrapping_add(1800),
        })
        .unwrap();
        let sigma1 = truth.top_value();
        let mut sigma_err: f64 = 0.0;
        let mut vec_err: f64 = 0.0;
        let mut eps_sigma_polyak: f64 = 0.0;
        let eps = 1e-8;
        for method in [
            Method::Momentum(MomentumConfig::polyak(0.5).with_seed(seed.wrapping_add(1801))),
            Method::Momentum(MomentumConfig::nesterov(0.5).with_seed(seed.wrapping_add(1801))),
            Method::NesterovGeneral(
                NesterovConfig::default().with_seed(seed.wrapping_add(1801)),
            ),
        ] {
            let res = method.solve(&m, None, false).unwrap();
            if !res.converged {
                sigma_err = f64::INFINITY;
                continue;
            }
            sigma_err = sigma_err.max((res.sigma_hat - sigma1).abs() / (10.0 * eps * sigma1));
            vec_err = vec_err.max(vec::sign_agnostic_distance(&res.u_hat, truth.top_vector()));
        }
        // Polyak with its stability warmup on the full decay recovery.
        let k = decay_rank(n);
        let res = solve_ksvd(
            &m,
            k,
            &Method::Momentum(MomentumConfig::polyak(0.8).with_seed(seed.wrapping_add(1802))),
        )
        .unwrap();
        let (es, _) = recovery_errors(&res, &truth, k).unwrap();
        eps_sigma_polyak = eps_sigma_polyak.max(es);
        out.push(CheckResult::new(
            "accel-limit-sigma",
            sigma_err,
            1.0,
            format!("relative to the 10 eps sigma1 budget, n = {n}"),
        ));
        out.push(CheckResult::new(
            "accel-limit-vector",
            vec_err,
            1e-4,
            format!("sign-agnostic distance to u1, n = {n}"),
        ));
        out.push(CheckResult::new(
            "accel-polyak-decay-recovery",
            eps_sigma_polyak,
            1e-6,
            format!("heavy-ball with warmup, full rank-{k} recovery"),
        ));
    }

    // --- generator invariants ---
    {
        let mut asym: f64 = 0.0;
        let mut frame: f64 = 0.0;
        let mut fidelity: f64 = 0.0;
        let mut determinism: f64 = 0.0;
        for (i, fam) in [Family::ExpDecay, Family::PolyDecay, Family::LinDecay]
            .into_iter()
            .enumerate()
        {
            let gspec = GeneratorSpec {
                n: 30,
                family: fam,
                seed: seed.wrapping_add(1900 + i as u64),
            };
            let (m, truth) = generate(&gspec).unwrap();
            for r in 0..30 {
                for c in 0..30 {
                    asym = asym.max((m.get(r, c) - m.get(c, r)).abs());
                }
            }
            frame = frame.max(truth.orthonormality_residual());
            let eig = jacobi_eigh(&m).unwrap();
            for (lam, sig) in eig.values.iter().zip(&truth.values) {
                fidelity = fidelity.max((lam - sig).abs() / sig);
            }
            let again = generate(&gspec).unwrap();
            if again.0.as_slice() != m.as_slice() {
                determinism = 1.0;
            }
        }
        out.push(CheckResult::new(
            "generator-symmetry",
            asym,
            1e-14,
            "exact mirror of generated matrices",
        ));
        out.push(CheckResult::new(
            "generator-frame-orthonormality",
            frame,
            1e-10,
            "||U^T U - I||_F of the truth frame",
        ));
        out.push(CheckResult::new(
            "generator-spectrum-fidelity",
            fidelity,
            1e-10,
            "oracle eigenvalues vs declared spectrum, relative",
        ));
        out.push(CheckResult::new(
            "generator-determinism",
            determinism,
            0.0,
            "identical spec + seed gives bit-identical data",
        ));
    }

    out
}

/// Renders the suite outcome; returns true iff everything passed.
pub fn report_suite(results: &[CheckResult], mut sink: impl std::io::Write) -> bool {
    let mut all = true;
    for r in results {
        all &= r.passed;
        let _ = writeln!(
            sink,
            "{} {:<32} observed {:>12.3e}  bound {:>9.1e}  {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.observed,
            r.bound,
            r.detail
        );
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fast_suite_passes() {
        let results = run_suite(VerifyLevel::Fast, 0);
        for r in &results {
            assert!(
                r.passed,
                "{} failed: observed {:e} > bound {:e} ({})",
                r.name, r.observed, r.bound, r.detail
            );
        }
    }

    #[test]
    fn corrupted_step_fails_monotone_cosine() {
        // Negative control: a deliberately wrong update (gradient ascent)
        // must break the alignment monotonicity check.
        let (m, truth) = generate(&GeneratorSpec {
            n: 12,
            family: Family::Rank2Gap { gap: 0.4 },
            seed: 5,
        })
        .unwrap();
        let mut x = random_init(&m, 6).unwrap();
        let mut trace = vec![TraceRecord::initial(&x, &m, Some(&truth))];
        for t in 1..60 {
            // Corruption: step away from the gradient direction with a
            // sign flip on alternating iterations.
            let step = gd_step(&x, &m, 0.5).unwrap();
            let x_next: Vec<f64> = if t % 2 == 0 {
                step
            } else {
                x.iter().zip(&step).map(|(a, s)| 2.0 * a - s).collect()
            };
            trace.push(crate::rank1::diagnostics(t, &x_next, &x, &m, Some(&truth)));
            x = x_next;
        }
        let check = check_monotone_cosine(&trace, "corrupted");
        assert!(!check.passed, "corrupted run should fail: {check:?}");
    }
}
