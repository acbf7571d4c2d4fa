//! Power-method baseline with the same initialization, deflation machinery,
//! and two-sided stopping rule as the gradient solver.

use crate::error::{Error, Result};
use crate::linalg::{matvec, LinearOperator, Spectrum};
use crate::linalg::vec;
use crate::rank1::{random_init, should_stop, Rank1Result, SolverConfig, TraceRecord};

/// One normalized power iteration `x -> Mx / ||Mx||`.
pub fn power_step(x: &[f64], m: &dyn LinearOperator) -> Result<Vec<f64>> {
    let mx = matvec(m, x)?;
    let n = vec::norm(&mx);
    if n == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(vec::scaled(&mx, 1.0 / n))
}

/// Power iteration until both `||x_{t+1} - x_t||` (sign-agnostic) and
/// `| ||M x_{t+1}|| - ||M x_t|| |` fall below `cfg.eps`, from iteration 2
/// onward. Recovers `sigma_hat = ||M x||` (an eigenvalue directly, unlike
/// the gradient solver's `||x||^2`) and `u_hat = x`.
///
/// The direction change uses `min(||x' - x||, ||x' + x||)` so that iterates
/// on matrices with negative eigenvalues cannot stall the rule by flipping
/// sign; on PSD inputs this is identical to the raw difference.
pub fn solve_power(
    m: &dyn LinearOperator,
    cfg: &SolverConfig,
    reference: Option<&Spectrum>,
    record_trace: bool,
) -> Result<Rank1Result> {
    cfg.validate()?;
    let x0 = random_init(m, cfg.seed)?;
    let mut x = vec::normalized(&x0);
    let mut mx = matvec(m, &x)?;
    let mut trace = if record_trace {
        Some(vec![power_record(0, &x, &mx, None, None, reference)])
    } else {
        None
    };

    let mut iterations = 0;
    let mut converged = false;
    for t in 1..=cfg.max_iter {
        let norm_mx = vec::norm(&mx);
        if norm_mx == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let x_next = vec::scaled(&mx, 1.0 / norm_mx);
        let mx_next = matvec(m, &x_next)?;
        let eps_u = vec::sign_agnostic_distance(&x_next, &x);
        let eps_sigma = (vec::norm(&mx_next) - norm_mx).abs();
        if let Some(tr) = trace.as_mut() {
            tr.push(power_record(
                t,
                &x_next,
                &mx_next,
                Some(eps_u),
                Some(eps_sigma),
                reference,
            ));
        }
        x = x_next;
        mx = mx_next;
        iterations = t;
        if should_stop(t, eps_u, eps_sigma, cfg.eps) {
            converged = true;
            break;
        }
    }

    Ok(Rank1Result {
        sigma_hat: vec::norm(&mx),
        u_hat: x,
        iterations,
        converged,
        diverged: false,
        trace,
    })
}

/// Trace record for a unit-norm power iterate. Shares the gradient-trace
/// schema; the Heron residual column stays empty because the iterate norm
/// carries no eigenvalue information here.
fn power_record(
    t: usize,
    x: &[f64],
    mx: &[f64],
    eps_u: Option<f64>,
    eps_sigma: Option<f64>,
    reference: Option<&Spectrum>,
) -> TraceRecord {
    let norm_x = vec::norm(x);
    let cos_theta1 = reference
        .filter(|s| !s.is_empty())
        .map(|s| vec::dot(x, s.top_vector()) / norm_x);
    let grad = crate::rank1::grad_from_matvec(x, mx);
    TraceRecord {
        t,
        norm_x,
        cos_theta1,
        heron_eps: None,
        grad_norm: vec::norm(&grad),
        eps_u,
        eps_sigma,
    }
}
