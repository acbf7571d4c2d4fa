//! Benchmark and verification machinery behind the CLI: gap sweeps with
//! slope fits, the decay-suite recovery benchmark, the invariant suite, and
//! run manifests.

pub mod decay;
pub mod manifest;
pub mod sweep;
pub mod verify;

pub use decay::{run_decay_bench, run_decay_cells, DecayFamily, DecayParams, DecayRow};
pub use manifest::{fingerprint_bytes, fingerprint_f64s, RunManifest};
pub use sweep::{
    fit_loglog, run_gap_sweep, SlopeFit, SweepParams, SweepReport, SweepRow, DEFAULT_BETA_GRID,
};
pub use verify::{run_suite, CheckResult, VerifyLevel};

use crate::error::{Error, Result};

/// Solver selection as exposed on the benchmark surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodKind {
    Gd,
    Power,
    Polyak,
    Nesterov,
}

impl MethodKind {
    pub fn label(&self) -> &'static str {
        match self {
            MethodKind::Gd => "gd",
            MethodKind::Power => "power",
            MethodKind::Polyak => "polyak",
            MethodKind::Nesterov => "nesterov",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "gd" => Ok(MethodKind::Gd),
            "power" => Ok(MethodKind::Power),
            "polyak" => Ok(MethodKind::Polyak),
            "nesterov" => Ok(MethodKind::Nesterov),
            other => Err(Error::InvalidConfig(format!(
                "unknown method '{other}' (gd, power, polyak, nesterov)"
            ))),
        }
    }

    /// Whether the method searches the momentum grid.
    pub fn uses_beta(&self) -> bool {
        matches!(self, MethodKind::Polyak | MethodKind::Nesterov)
    }
}

/// Sample mean and standard deviation (n - 1 denominator; zero for a single
/// sample).
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Median of an iterator of values.
pub fn median(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = xs.into_iter().collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_and_mean_std() {
        assert_eq!(median([3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median([4.0, 1.0, 2.0, 3.0]), 2.5);
        let (m, s) = mean_std(&[2.0, 4.0]);
        assert_eq!(m, 3.0);
        assert!((s - 2.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(mean_std(&[5.0]), (5.0, 0.0));
    }
}
