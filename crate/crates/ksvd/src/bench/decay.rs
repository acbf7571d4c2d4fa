//! Decay-suite benchmark: per (family, n, method) cells at rank
//! `floor(log2 n)`, reporting runtime and recovery errors against the
//! generator's exact spectrum.

use std::fmt::Write as FmtWrite;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::bench::{mean_std, MethodKind};
use crate::driver::{recovery_errors, solve_ksvd, Method};
use crate::error::{Error, Result};
use crate::matgen::{decay_rank, generate, Family, GeneratorSpec};

/// Decay spectrum families exposed by the benchmark surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayFamily {
    Exp,
    Poly,
    Lin,
}

impl DecayFamily {
    pub fn label(&self) -> &'static str {
        match self {
            DecayFamily::Exp => "exp",
            DecayFamily::Poly => "poly",
            DecayFamily::Lin => "lin",
        }
    }

    pub fn to_family(self) -> Family {
        match self {
            DecayFamily::Exp => Family::ExpDecay,
            DecayFamily::Poly => Family::PolyDecay,
            DecayFamily::Lin => Family::LinDecay,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exp" => Ok(DecayFamily::Exp),
            "poly" => Ok(DecayFamily::Poly),
            "lin" => Ok(DecayFamily::Lin),
            other => Err(Error::InvalidConfig(format!(
                "unknown family '{other}' (exp, poly, lin)"
            ))),
        }
    }

    pub fn all() -> [DecayFamily; 3] {
        [DecayFamily::Exp, DecayFamily::Poly, DecayFamily::Lin]
    }
}

#[derive(Debug, Clone)]
pub struct DecayParams {
    pub families: Vec<DecayFamily>,
    pub n_list: Vec<usize>,
    pub methods: Vec<MethodKind>,
    pub repeats: usize,
    pub eta: f64,
    pub eps: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub jobs: usize,
    /// Momentum coefficient for polyak/nesterov cells.
    pub beta: f64,
    /// Override for the number of recovered pairs; `None` means
    /// `floor(log2 n)`.
    pub k: Option<usize>,
}

impl Default for DecayParams {
    fn default() -> Self {
        Self {
            families: DecayFamily::all().to_vec(),
            n_list: vec![50, 100, 200],
            methods: vec![MethodKind::Gd, MethodKind::Power],
            repeats: 3,
            eta: 0.5,
            eps: 1e-8,
            max_iter: 500_000,
            seed: 0,
            jobs: 0,
            beta: 0.8,
            k: None,
        }
    }
}

/// Aggregated benchmark cell.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DecayRow {
    pub family: String,
    pub n: usize,
    pub method: String,
    pub runtime_ms_mean: f64,
    pub runtime_ms_std: f64,
    pub eps_sigma_mean: f64,
    pub eps_sigma_std: f64,
    pub eps_uv_mean: f64,
    pub eps_uv_std: f64,
}

fn build_method(kind: MethodKind, p: &DecayParams, seed: u64) -> Method {
    let base = crate::rank1::SolverConfig {
        eta: p.eta,
        eps: p.eps,
        max_iter: p.max_iter,
        seed,
    };
    match kind {
        MethodKind::Gd => Method::Gd(base),
        MethodKind::Power => Method::Power(base),
        MethodKind::Polyak => {
            let mut c = crate::accel::MomentumConfig::polyak(p.beta);
            c.eta = p.eta;
            c.eps = p.eps;
            c.max_iter = p.max_iter;
            c.seed = seed;
            Method::Momentum(c)
        }
        MethodKind::Nesterov => {
            let mut c = crate::accel::MomentumConfig::nesterov(p.beta);
            c.eta = p.eta;
            c.eps = p.eps;
            c.max_iter = p.max_iter;
            c.seed = seed;
            Method::Momentum(c)
        }
    }
}

/// Per-seed errors for one cell; exposed so callers can assert every seed
/// rather than the mean.
#[derive(Debug, Clone)]
pub struct DecayCellRun {
    pub family: String,
    pub n: usize,
    pub method: String,
    pub seed: u64,
    pub converged: bool,
    pub eps_sigma: f64,
    pub eps_uv: f64,
    pub sigma1: f64,
    pub runtime_ms: f64,
}

/// Runs every (family, n, method, seed) cell and returns the raw runs.
pub fn run_decay_cells(params: &DecayParams) -> Result<Vec<DecayCellRun>> {
    let mut cells = Vec::new();
    for (fi, &family) in params.families.iter().enumerate() {
        for (nj, &n) in params.n_list.iter().enumerate() {
            for rep in 0..params.repeats {
                let seed = params
                    .seed
                    .wrapping_add((fi as u64) << 32)
                    .wrapping_add((nj as u64) << 16)
                    .wrapping_add(rep as u64);
                cells.push((family, n, seed));
            }
        }
    }

    let run_cell = |&(family, n, seed): &(DecayFamily, usize, u64)| -> Result<Vec<DecayCellRun>> {
        let (m, truth) = generate(&GeneratorSpec {
            n,
            family: family.to_family(),
            seed,
        })?;
        let k = params.k.unwrap_or_else(|| decay_rank(n)).min(truth.len());
        let mut out = Vec::new();
        for &kind in &params.methods {
            let method = build_method(kind, params, seed);
            let start = Instant::now();
            let res = solve_ksvd(&m, k, &method)?;
            let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            let (eps_sigma, eps_uv) = recovery_errors(&res, &truth, k)?;
            out.push(DecayCellRun {
                family: family.label().to_string(),
                n,
                method: kind.label().to_string(),
                seed,
                converged: res.converged,
                eps_sigma,
                eps_uv,
                sigma1: truth.top_value(),
                runtime_ms,
            });
        }
        Ok(out)
    };

    let results: Vec<Result<Vec<DecayCellRun>>> = if params.jobs == 1 {
        cells.iter().map(run_cell).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(params.jobs)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
        pool.install(|| cells.par_iter().map(run_cell).collect())
    };

    let mut runs = Vec::new();
    for r in results {
        runs.extend(r?);
    }
    runs.sort_by(|a, b| {
        (&a.family, a.n, &a.method, a.seed)
            .partial_cmp(&(&b.family, b.n, &b.method, b.seed))
            .unwrap()
    });
    Ok(runs)
}

/// Aggregates raw runs into the report rows.
pub fn aggregate_decay(runs: &[DecayCellRun]) -> Vec<DecayRow> {
    let mut keys: Vec<(String, usize, String)> = runs
        .iter()
        .map(|r| (r.family.clone(), r.n, r.method.clone()))
        .collect();
    keys.dedup();
    keys.iter()
        .map(|(family, n, method)| {
            let cell: Vec<&DecayCellRun> = runs
                .iter()
                .filter(|r| &r.family == family && r.n == *n && &r.method == method)
                .collect();
            let (rt_mean, rt_std) =
                mean_std(&cell.iter().map(|r| r.runtime_ms).collect::<Vec<_>>());
            let (es_mean, es_std) =
                mean_std(&cell.iter().map(|r| r.eps_sigma).collect::<Vec<_>>());
            let (euv_mean, euv_std) = mean_std(&cell.iter().map(|r| r.eps_uv).collect::<Vec<_>>());
            DecayRow {
                family: family.clone(),
                n: *n,
                method: method.clone(),
                runtime_ms_mean: rt_mean,
                runtime_ms_std: rt_std,
                eps_sigma_mean: es_mean,
                eps_sigma_std: es_std,
                eps_uv_mean: euv_mean,
                eps_uv_std: euv_std,
            }
        })
        .collect()
}

pub fn run_decay_bench(params: &DecayParams) -> Result<Vec<DecayRow>> {
    Ok(aggregate_decay(&run_decay_cells(params)?))
}

pub const DECAY_HEADER: &str = "family,n,method,runtime_ms_mean,runtime_ms_std,\
                                eps_sigma_mean,eps_sigma_std,eps_uv_mean,eps_uv_std";

pub fn decay_to_csv(rows: &[DecayRow]) -> String {
    let mut out = String::from(DECAY_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.family,
            r.n,
            r.method,
            r.runtime_ms_mean,
            r.runtime_ms_std,
            r.eps_sigma_mean,
            r.eps_sigma_std,
            r.eps_uv_mean,
            r.eps_uv_std
        );
    }
    out
}

pub fn parse_decay_csv(text: &str) -> Result<Vec<DecayRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected 9 fields, got {}", f.len()),
            });
        }
        let num = |s: &str| -> Result<f64> {
            s.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad number '{s}'"),
            })
        };
        rows.push(DecayRow {
            family: f[0].to_string(),
            n: f[1].parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad n '{}'", f[1]),
            })?,
            method: f[2].to_string(),
            runtime_ms_mean: num(f[3])?,
            runtime_ms_std: num(f[4])?,
            eps_sigma_mean: num(f[5])?,
            eps_sigma_std: num(f[6])?,
            eps_uv_mean: num(f[7])?,
            eps_uv_std: num(f[8])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_decay_bench_produces_tight_errors() {
        let params = DecayParams {
            families: vec![DecayFamily::Poly],
            n_list: vec![32],
            methods: vec![MethodKind::Gd, MethodKind::Power],
            repeats: 2,
            jobs: 1,
            ..Default::default()
        };
        let rows = run_decay_bench(&params).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.eps_sigma_mean <= 1e-6, "{row:?}");
            assert!(row.eps_uv_mean <= 1e-4, "{row:?}");
        }
    }

    #[test]
    fn decay_csv_roundtrip() {
        let rows = vec![DecayRow {
            family: "exp".into(),
            n: 50,
            method: "gd".into(),
            runtime_ms_mean: 1.25,
            runtime_ms_std: 0.5,
            eps_sigma_mean: 1e-9,
            eps_sigma_std: 1e-10,
            eps_uv_mean: 2e-6,
            eps_uv_std: 1e-7,
        }];
        let parsed = parse_decay_csv(&decay_to_csv(&rows)).unwrap();
        assert_eq!(parsed, rows);
    }
}
