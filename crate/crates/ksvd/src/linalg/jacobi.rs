//! Cyclic Jacobi eigendecomposition.
//!
//! This is the verification oracle for every iterative solver in the crate:
//! it is self-contained, shares no code path with gradient or power
//! iterations, and is accurate enough (off-diagonal Frobenius threshold
//! `1e-14 * ||A||_F`) to pin reconstruction residuals at `1e-10`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::dense::DenseSymMatrix;
use crate::linalg::vec;

/// Largest dimension accepted by [`jacobi_eigh`]; the oracle is dense and
/// cubic per sweep.
pub const JACOBI_MAX_DIM: usize = 2000;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with matching orthonormal eigenvectors.
///
/// Serializes as `{"values": [...], "vectors": [[...]]}` where
/// `vectors[i]` is the eigenvector for `values[i]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    /// Largest eigenvalue.
    pub fn top_value(&self) -> f64 {
        self.values[0]
    }

    pub fn top_vector(&self) -> &[f64] {
        &self.vectors[0]
    }

    /// `||V^T V - I||_F` over the stored vectors.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.len();
        let mut r2 = 0.0;
        for i in 0..k {
            for j in 0..k {
                let g = vec::dot(&self.vectors[i], &self.vectors[j]);
                let target = if i == j { 1.0 } else { 0.0 };
                r2 += (g - target) * (g - target);
            }
        }
        r2.sqrt()
    }
}

/// Full eigendecomposition of a dense symmetric matrix by cyclic Jacobi
/// sweeps. Eigenvalues come back descending; each eigenvector is normalized
/// so its largest-magnitude entry is positive.
pub fn jacobi_eigh(a: &DenseSymMatrix) -> Result<Spectrum> {
    let n = a.dim();
    if n > JACOBI_MAX_DIM {
        return Err(Error::InvalidConfig(format!(
            "jacobi_eigh supports n <= {JACOBI_MAX_DIM}, got {n}"
        )));
    }

    let mut m = a.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let fro = a.frob_norm2().sqrt();
    if fro == 0.0 {
        return Ok(sorted_spectrum(vec![0.0; n], v, n));
    }
    let threshold = 1e-14 * fro;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&m, n) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, n, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&m, n) > threshold {
        return Err(Error::EighNoConvergence { sweeps: MAX_SWEEPS });
    }

    let values: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    Ok(sorted_spectrum(values, v, n))
}

fn off_diagonal_norm(m: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * m[i * n + j] * m[i * n + j];
        }
    }
    s.sqrt()
}

/// One Jacobi rotation annihilating `m[p][q]`, accumulated into `v`.
fn rotate(m: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = m[p * n + p];
    let aqq = m[q * n + q];
    let tau = (aqq - app) / (2.0 * apq);
    // Smaller-magnitude root of t^2 + 2 tau t - 1 = 0; the asymptotic form
    // avoids overflow of tau^2.
    let t = if tau.abs() > 1e150 {
        0.5 / tau
    } else if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    m[p * n + p] = app - t * apq;
    m[q * n + q] = aqq + t * apq;
    m[p * n + q] = 0.0;
    m[q * n + p] = 0.0;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        m[k * n + p] = new_p;
        m[p * n + k] = new_p;
        m[k * n + q] = new_q;
        m[q * n + k] = new_q;
    }
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}

fn sorted_spectrum(values: Vec<f64>, v: Vec<f64>, n: usize) -> Spectrum {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap());

    let mut out_values = Vec::with_capacity(n);
    let mut out_vectors = Vec::with_capacity(n);
    for &col in &order {
        out_values.push(values[col]);
        let mut veck: Vec<f64> = (0..n).map(|row| v[row * n + col]).collect();
        // Sign convention: largest-magnitude entry positive.
        let lead = veck
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if veck[lead] < 0.0 {
            for x in &mut veck {
                *x = -*x;
            }
        }
        out_vectors.push(veck);
    }
    Spectrum {
        values: out_values,
        vectors: out_vectors,
    }
}
