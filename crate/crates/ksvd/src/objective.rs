//! The nonconvex rank-1 factorization objective
//! `g(x) = 1/4 ||M - x x^T||_F^2`, its gradient and Hessian action, local
//! curvature constants, and two exact error-decomposition identities used
//! throughout the diagnostics.

use crate::error::{Error, Result};
use crate::linalg::{matvec, LinearOperator};
use crate::linalg::vec;

/// Local curvature of the objective around a global minimizer
/// `x* = +-sqrt(sigma1) u1`: strong convexity `mu = (sigma1 - sigma2) / 4`,
/// smoothness `l = 9 sigma1 / 2`, valid within distance
/// `radius = (sigma1 - sigma2) / (15 sqrt(sigma1))` of `x*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureBounds {
    pub mu: f64,
    pub l: f64,
    pub radius: f64,
}

pub fn curvature_bounds(sigma1: f64, sigma2: f64) -> Result<CurvatureBounds> {
    if !(sigma1 > sigma2 && sigma2 >= 0.0) {
        return Err(Error::DegenerateGap);
    }
    Ok(CurvatureBounds {
        mu: (sigma1 - sigma2) / 4.0,
        l: 4.5 * sigma1,
        radius: (sigma1 - sigma2) / (15.0 * sigma1.sqrt()),
    })
}

/// Objective value `1/4 (||M||_F^2 - 2 x^T M x + ||x||^4)`.
///
/// The constant `frob_m2 = ||M||_F^2` is supplied by the caller so the
/// objective can be evaluated against an implicit operator; it is computed
/// once per matrix, not per evaluation.
pub fn g_value(x: &[f64], m: &dyn LinearOperator, frob_m2: f64) -> Result<f64> {
    let mx = matvec(m, x)?;
    let xmx = vec::dot(x, &mx);
    let n2 = vec::norm2(x);
    Ok(0.25 * (frob_m2 - 2.0 * xmx + n2 * n2))
}

/// Gradient `||x||^2 x - M x`.
pub fn grad_g(x: &[f64], m: &dyn LinearOperator) -> Result<Vec<f64>> {
    let mx = matvec(m, x)?;
    let n2 = vec::norm2(x);
    Ok(x.iter().zip(&mx).map(|(xi, mi)| n2 * xi - mi).collect())
}

/// Hessian action `||x||^2 v + 2 (x . v) x - M v`.
pub fn hessian_apply(x: &[f64], m: &dyn LinearOperator, v: &[f64]) -> Result<Vec<f64>> {
    if x.len() != v.len() {
        return Err(Error::DimMismatch {
            expected: x.len(),
            got: v.len(),
        });
    }
    let mv = matvec(m, v)?;
    let n2 = vec::norm2(x);
    let xv = vec::dot(x, v);
    Ok(x.iter()
        .zip(v)
        .zip(&mv)
        .map(|((xi, vi), mi)| n2 * vi + 2.0 * xv * xi - mi)
        .collect())
}

/// The split of `||x - y||^2` into a norm part and a direction part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorSplit {
    /// `(||x|| - ||y||)^2`
    pub norm_gap: f64,
    /// `||x|| ||y|| ||x/||x|| - y/||y||||^2`
    pub direction_gap: f64,
    /// Sum of the two parts; equals `||x - y||^2` exactly in reals.
    pub total: f64,
}

/// Splits `||x - y||^2 = (||x|| - ||y||)^2 + ||x|| ||y|| ||x^ - y^||^2`,
/// computing both terms independently of `||x - y||` itself.
pub fn error_decomposition(x: &[f64], y: &[f64]) -> Result<ErrorSplit> {
    if x.len() != y.len() {
        return Err(Error::DimMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let nx = vec::norm(x);
    let ny = vec::norm(y);
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let norm_gap = (nx - ny) * (nx - ny);
    let dir = vec::sub(&vec::scaled(x, 1.0 / nx), &vec::scaled(y, 1.0 / ny));
    let direction_gap = nx * ny * vec::norm2(&dir);
    Ok(ErrorSplit {
        norm_gap,
        direction_gap,
        total: norm_gap + direction_gap,
    })
}

/// Evaluates
/// `(||x||^2 - ||y||^2)^2 + (||x||^2 ||y||^2 / 2) ||x^ - y^||^2 ||x^ + y^||^2`,
/// which equals `||x x^T - y y^T||_F^2` exactly in reals.
pub fn outer_error_decomposition(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let nx2 = vec::norm2(x);
    let ny2 = vec::norm2(y);
    if nx2 == 0.0 || ny2 == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let xh = vec::scaled(x, 1.0 / nx2.sqrt());
    let yh = vec::scaled(y, 1.0 / ny2.sqrt());
    let diff2 = vec::norm2(&vec::sub(&xh, &yh));
    let sum2 = vec::norm2(&vec::add_scaled(&xh, 1.0, &yh));
    Ok((nx2 - ny2) * (nx2 - ny2) + 0.5 * nx2 * ny2 * diff2 * sum2)
}
