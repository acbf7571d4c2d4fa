use thiserror::Error;

/// Errors produced by solvers, operators, generators, and file loaders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {max_asym:e} at ({i},{j}))")]
    NotSymmetric { max_asym: f64, i: usize, j: usize },

    #[error("non-finite entry encountered")]
    NotFinite,

    #[error("zero-norm vector where a direction is required")]
    ZeroNorm,

    #[error("initialization failed: image of the operator was zero after {attempts} resamples")]
    InitExhausted { attempts: usize },

    #[error("degenerate spectral gap: sigma1 <= sigma2")]
    DegenerateGap,

    #[error("spectrum tail is not positive definite (sigma_d <= 0)")]
    NotPositiveDefinite,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    EighNoConvergence { sweeps: usize },

    #[error("solve failed at deflation level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
