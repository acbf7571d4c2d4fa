//! Small dense-vector helpers shared by every solver.
//!
//! Vectors are plain `&[f64]` / `Vec<f64>`; all functions assume equal
//! lengths (checked by `debug_assert`) and deterministic, sequential
//! reduction order.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Squared Euclidean norm.
pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm2(a).sqrt()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

/// `a + s * b`
pub fn add_scaled(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a / ||a||`; caller must ensure the norm is nonzero.
pub fn normalized(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    debug_assert!(n > 0.0);
    scaled(a, 1.0 / n)
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Distance between unit directions ignoring overall sign:
/// `min(||a - b||, ||a + b||)`.
pub fn sign_agnostic_distance(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (x, y) in a.iter().zip(b) {
        minus += (x - y) * (x - y);
        plus += (x + y) * (x + y);
    }
    minus.min(plus).sqrt()
}
