//! The matvec abstraction.
//!
//! Every solver consumes a [`LinearOperator`] instead of a concrete matrix,
//! so Gram products, dilations, and deflated matrices never need to be
//! densified. Implementations must be symmetric as bilinear forms
//! (`<Av, w> = <v, Aw>`) and deterministic for fixed inputs.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::linalg::dense::{DenseMatrix, DenseSymMatrix};
use crate::linalg::vec;

/// A symmetric linear map `v -> Av` on `R^dim`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// Computes `Av`. Callers are expected to pass a vector of length
    /// `dim()`; use [`matvec`] for a checked entry point.
    fn apply(&self, v: &[f64]) -> Vec<f64>;
}

/// Checked matrix-vector product.
pub fn matvec(a: &dyn LinearOperator, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != a.dim() {
        return Err(Error::DimMismatch {
            expected: a.dim(),
            got: v.len(),
        });
    }
    Ok(a.apply(v))
}

impl LinearOperator for DenseSymMatrix {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.dim());
        (0..self.dim()).map(|i| vec::dot(self.row(i), v)).collect()
    }
}

/// `base - sum_l sigma_l u_l u_l^T` applied implicitly.
pub struct Deflated<'a> {
    base: &'a dyn LinearOperator,
    pairs: Vec<(f64, Vec<f64>)>,
}

impl<'a> Deflated<'a> {
    /// Each deflation direction must be unit-norm within `1e-8` and match
    /// the base dimension.
    pub fn new(base: &'a dyn LinearOperator, pairs: Vec<(f64, Vec<f64>)>) -> Result<Self> {
        let mut out = Self {
            base,
            pairs: Vec::with_capacity(pairs.len()),
        };
        for (sigma, u) in pairs {
            out.push(sigma, u)?;
        }
        Ok(out)
    }

    pub fn push(&mut self, sigma: f64, u: Vec<f64>) -> Result<()> {
        if u.len() != self.base.dim() {
            return Err(Error::DimMismatch {
                expected: self.base.dim(),
                got: u.len(),
            });
        }
        if (vec::norm(&u) - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidConfig(
                "deflation direction is not unit-norm".into(),
            ));
        }
        self.pairs.push((sigma, u));
        Ok(())
    }

    pub fn pairs(&self) -> &[(f64, Vec<f64>)] {
        &self.pairs
    }
}

impl LinearOperator for Deflated<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.base.apply(v);
        for (sigma, u) in &self.pairs {
            let c = sigma * vec::dot(u, v);
            for (o, ui) in out.iter_mut().zip(u) {
                *o -= c * ui;
            }
        }
        out
    }
}

/// Convenience constructor mirroring the operator algebra
/// `A - sum_l sigma_l u_l u_l^T`.
pub fn deflated_operator<'a>(
    base: &'a dyn LinearOperator,
    pairs: Vec<(f64, Vec<f64>)>,
) -> Result<Deflated<'a>> {
    Deflated::new(base, pairs)
}

/// `v -> N (N^T v)` on `R^m` for a general m-by-n matrix `N`; symmetric PSD
/// with eigenvalues equal to the squared singular values of `N`.
pub struct GramOperator<'a> {
    n: &'a DenseMatrix,
}

impl<'a> GramOperator<'a> {
    pub fn new(n: &'a DenseMatrix) -> Self {
        Self { n }
    }
}

impl LinearOperator for GramOperator<'_> {
    fn dim(&self) -> usize {
        self.n.rows()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.n.apply(&self.n.apply_transpose(v))
    }
}

/// `(x; y) -> (N y; N^T x)` on `R^{m+n}`: the symmetric embedding of a
/// general m-by-n matrix whose positive eigenpairs encode its singular
/// triplets.
pub struct DilationOperator<'a> {
    n: &'a DenseMatrix,
}

impl<'a> DilationOperator<'a> {
    pub fn new(n: &'a DenseMatrix) -> Self {
        Self { n }
    }

    pub fn split(&self) -> usize {
        self.n.rows()
    }
}

impl LinearOperator for DilationOperator<'_> {
    fn dim(&self) -> usize {
        self.n.rows() + self.n.cols()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        let m = self.n.rows();
        let mut out = self.n.apply(&v[m..]);
        out.extend(self.n.apply_transpose(&v[..m]));
        out
    }
}

/// Wraps an operator and counts applications; used by the deflation driver
/// to report the total matvec cost of a solve.
pub struct CountingOperator<'a> {
    inner: &'a dyn LinearOperator,
    count: AtomicU64,
}

impl<'a> CountingOperator<'a> {
    pub fn new(inner: &'a dyn LinearOperator) -> Self {
        Self {
            inner,
            count: AtomicU64::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }
}

impl LinearOperator for CountingOperator<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.apply(v)
    }
}

/// Densifies an operator; test and diagnostic use only (`O(dim^2)` applies).
pub fn densify(a: &dyn LinearOperator) -> Result<DenseSymMatrix> {
    let n = a.dim();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(a.apply(&e));
    }
    // Average the off-diagonal pair so roundoff asymmetry cannot trip the
    // symmetric constructor.
    DenseSymMatrix::from_fn(n, |i, j| 0.5 * (cols[j][i] + cols[i][j]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matvec_identity() {
        let a = DenseSymMatrix::identity(3);
        let v = vec![1.0, 2.0, 3.0];
        assert_eq!(matvec(&a, &v).unwrap(), v);
    }

    #[test]
    fn matvec_diagonal() {
        let a = DenseSymMatrix::diagonal(&[2.0, 0.0]);
        assert_eq!(matvec(&a, &[1.0, 1.0]).unwrap(), vec![2.0, 0.0]);
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let a = DenseSymMatrix::identity(3);
        assert!(matches!(
            matvec(&a, &[1.0, 2.0]),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn matvec_agrees_with_double_loop() {
        // Fixed 6x6 symmetric matrix; oracle is the fully indexed sum.
        let n = 6;
        let a = DenseSymMatrix::from_fn(n, |i, j| ((i * 7 + j * 3) % 11) as f64 - 5.0).unwrap();
        let v: Vec<f64> = (0..n).map(|i| (i as f64) * 0.37 - 1.0).collect();
        let got = matvec(&a, &v).unwrap();
        for (i, got_i) in got.iter().enumerate() {
            let mut want = 0.0;
            for (j, vj) in v.iter().enumerate() {
                want += a.get(i, j) * vj;
            }
            assert!((got_i - want).abs() <= 1e-14 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn empty_deflation_is_identity_on_base() {
        let a = DenseSymMatrix::diagonal(&[3.0, 1.0]);
        let d = Deflated::new(&a, vec![]).unwrap();
        let v = vec![0.5, -0.25];
        assert_eq!(d.apply(&v), a.apply(&v));
    }

    #[test]
    fn exact_rank1_deflation_annihilates() {
        let u = vec![3.0f64.sqrt().recip(); 3];
        let a = DenseSymMatrix::from_outer_sum(3, &[(3.0, u.clone())]).unwrap();
        let d = Deflated::new(&a, vec![(3.0, u)]).unwrap();
        for v in [vec![1.0, 0.0, 0.0], vec![0.3, -0.7, 1.1]] {
            let out = d.apply(&v);
            assert!(vec::norm(&out) <= 1e-12 * vec::norm(&v));
        }
    }

    #[test]
    fn deflation_rejects_non_unit_direction() {
        let a = DenseSymMatrix::identity(2);
        match Deflated::new(&a, vec![(1.0, vec![1.0, 1.0])]) {
            Err(Error::InvalidConfig(_)) => {}
            Err(other) => panic!("unexpected error {other:?}"),
            Ok(_) => panic!("non-unit direction accepted"),
        }
    }

    #[test]
    fn dilation_applies_blocks() {
        let n = DenseMatrix::new(2, 1, vec![1.0, 2.0]).unwrap();
        let d = DilationOperator::new(&n);
        // (x; y) -> (N y; N^T x)
        let out = d.apply(&[1.0, 1.0, 1.0]);
        assert_eq!(out, vec![1.0, 2.0, 3.0]);
    }
}
