//! Dense matrix storage: a validated symmetric matrix and a general
//! rectangular matrix, both row-major.

use crate::error::{Error, Result};
use crate::linalg::vec;

/// Relative asymmetry tolerated by [`DenseSymMatrix::new`].
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Dense n-by-n symmetric matrix, row-major.
///
/// Construction validates finiteness and symmetry
/// (`|a_ij - a_ji| <= 1e-12 * (1 + |a_ij|)`), then mirrors the upper
/// triangle so the stored data is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseSymMatrix {
    pub fn new(n: usize, mut data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidConfig("matrix dimension must be >= 1".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        if !vec::all_finite(&data) {
            return Err(Error::NotFinite);
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                let asym = (a - b).abs();
                if asym > SYMMETRY_TOL * (1.0 + a.abs()) {
                    return Err(Error::NotSymmetric {
                        max_asym: asym,
                        i,
                        j,
                    });
                }
            }
        }
        // Mirror exactly so downstream arithmetic sees a_ij == a_ji bitwise.
        for i in 0..n {
            for j in (i + 1)..n {
                data[j * n + i] = data[i * n + j];
            }
        }
        Ok(Self { n, data })
    }

    /// Builds from the upper triangle of `f(i, j)`, mirroring exactly.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self::new(n, data)
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, v) in values.iter().enumerate() {
            m.data[i * n + i] = *v;
        }
        m
    }

    /// `sum_l sigma_l u_l u_l^T`, built on the upper triangle so the result
    /// is exactly symmetric.
    pub fn from_outer_sum(n: usize, pairs: &[(f64, Vec<f64>)]) -> Result<Self> {
        for (_, u) in pairs {
            if u.len() != n {
                return Err(Error::DimMismatch {
                    expected: n,
                    got: u.len(),
                });
            }
        }
        Self::from_fn(n, |i, j| pairs.iter().map(|(s, u)| s * u[i] * u[j]).sum())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Squared Frobenius norm.
    pub fn frob_norm2(&self) -> f64 {
        vec::norm2(&self.data)
    }
}

/// Dense m-by-n general matrix, row-major. Used for asymmetric inputs and
/// for orthonormal frames.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig("matrix dimensions must be >= 1".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        if !vec::all_finite(&data) {
            return Err(Error::NotFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    /// `A v`
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| vec::dot(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    /// `A^T v`
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (row, vi) in self.data.chunks_exact(self.cols).zip(v) {
            for (o, a) in out.iter_mut().zip(row) {
                *o += vi * a;
            }
        }
        out
    }
}
