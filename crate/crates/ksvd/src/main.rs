//! Benchmark CLI over the library: single solves, gap sweeps, the decay
//! benchmark, and the invariant verification suite.
//!
//! Exit codes: 0 success/convergence, 2 non-convergence, 1 runtime error,
//! 64 flag/usage errors. Flag values override the `--config` file
//! (`key=value` lines), which overrides built-in defaults; `KSVD_SEED`
//! serves as a seed fallback.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use ksvd::accel::MomentumConfig;
use ksvd::bench::{
    decay, fingerprint_bytes, fingerprint_f64s, run_decay_bench, run_gap_sweep, run_suite, sweep,
    DecayFamily, DecayParams, MethodKind, RunManifest, SweepParams, VerifyLevel,
};
use ksvd::driver::{solve_asymmetric, solve_ksvd, AsymStrategy, Method};
use ksvd::error::{Error, Result};
use ksvd::linalg::LinearOperator;
use ksvd::market::{load_matrix_market, LoadedMatrix};
use ksvd::matgen::{generate, Family, GeneratorSpec};
use ksvd::rank1::SolverConfig;
use ksvd::trace::write_trace_csv;

#[derive(Parser)]
#[command(name = "ksvd", version, about = "Top-k SVD by adaptive-step gradient descent")]
struct Cli {
    /// Optional key=value config file consulted for unset flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance (from a Matrix Market file or a generator spec).
    Solve(SolveArgs),
    /// Rank-2 gap sweep with per-method log-log slope fits.
    Gapsweep(GapsweepArgs),
    /// Decay-suite recovery benchmark producing a CSV report.
    Decaybench(DecayArgs),
    /// Run the invariant suite and report per-check pass/fail.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Matrix Market input path.
    #[arg(long, conflicts_with = "generate")]
    input: Option<PathBuf>,
    /// Generator spec, e.g. rank2:n=100,gap=0.1 or exp:n=200.
    #[arg(long)]
    generate: Option<String>,
    /// Number of pairs to recover.
    #[arg(long)]
    k: Option<usize>,
    /// gd | power | polyak | nesterov
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    /// Momentum coefficient for polyak/nesterov.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Write the per-iteration trace of a k = 1 solve to this CSV path.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print the result as JSON (default is a short summary).
    #[arg(long)]
    json: bool,
    /// gram | dilation (rectangular inputs only).
    #[arg(long)]
    strategy: Option<String>,
}

#[derive(Args)]
struct GapsweepArgs {
    /// Comma-separated methods (gd, power, polyak, nesterov).
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Comma-separated momentum grid searched per cell.
    #[arg(long)]
    beta_grid: Option<String>,
    /// Comma-separated gaps; defaults to the 10^{-k/4} grid.
    #[arg(long)]
    gaps: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Worker threads (0 = all logical cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct DecayArgs {
    /// Comma-separated families (exp, poly, lin).
    #[arg(long)]
    families: Option<String>,
    #[arg(long)]
    n_list: Option<String>,
    #[arg(long)]
    methods: Option<String>,
    #[arg(long)]
    repeats: Option<usize>,
    /// Report CSV path.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Override the rank (default floor(log2 n)).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args)]
struct VerifyArgs {
    /// fast | full
    #[arg(long)]
    level: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

/// `key=value` per line, `#` comments. Flags override these values.
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            for (i, line) in fs::read_to_string(path)?.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or(Error::Parse {
                    line: i + 1,
                    msg: format!("config line must be key=value, got '{line}'"),
                })?;
                map.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Self(map))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Option<T> {
        self.0.get(key).and_then(|v| v.parse().ok())
    }

    fn get_string(&self, key: &str) -> Option<String> {
        self.0.get(key).cloned()
    }
}

fn resolve_seed(flag: Option<u64>, cfg: &FileConfig) -> u64 {
    flag.or_else(|| cfg.get("seed"))
        .or_else(|| std::env::var("KSVD_SEED").ok().and_then(|s| s.parse().ok()))
        .unwrap_or(0)
}

fn parse_f64_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad number '{t}'")))
        })
        .collect()
}

fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad integer '{t}'")))
        })
        .collect()
}

fn parse_method_list(s: &str) -> Result<Vec<MethodKind>> {
    s.split(',').map(|t| MethodKind::parse(t.trim())).collect()
}

/// Parses `family:key=val,...` generator specs.
fn parse_generate(spec: &str, seed: u64) -> Result<GeneratorSpec> {
    let (family_name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut params: HashMap<&str, &str> = HashMap::new();
    if !rest.is_empty() {
        for kv in rest.split(',') {
            let (k, v) = kv.split_once('=').ok_or_else(|| {
                Error::InvalidConfig(format!("generator parameter '{kv}' must be key=value"))
            })?;
            params.insert(k.trim(), v.trim());
        }
    }
    let need = |key: &str| -> Result<&str> {
        params
            .get(key)
            .copied()
            .ok_or_else(|| Error::InvalidConfig(format!("generator '{family_name}' needs {key}=")))
    };
    let n: usize = need("n")?
        .parse()
        .map_err(|_| Error::InvalidConfig("bad n".into()))?;
    let family = match family_name {
        "rank1" => Family::Rank1 {
            sigma: need("sigma")?
                .parse()
                .map_err(|_| Error::InvalidConfig("bad sigma".into()))?,
        },
        "rank2" => Family::Rank2Gap {
            gap: need("gap")?
                .parse()
                .map_err(|_| Error::InvalidConfig("bad gap".into()))?,
        },
        "exp" => Family::ExpDecay,
        "poly" => Family::PolyDecay,
        "lin" => Family::LinDecay,
        "explicit" => Family::Explicit {
            sigma: need("sigma")?
                .split('|')
                .map(|t| {
                    t.parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad sigma entry '{t}'")))
                })
                .collect::<Result<_>>()?,
        },
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown generator family '{other}' (rank1, rank2, exp, poly, lin, explicit)"
            )))
        }
    };
    Ok(GeneratorSpec { n, family, seed })
}

fn build_method(kind: MethodKind, eta: f64, eps: f64, max_iter: usize, seed: u64, beta: f64) -> Method {
    let base = SolverConfig {
        eta,
        eps,
        max_iter,
        seed,
    };
    match kind {
        MethodKind::Gd => Method::Gd(base),
        MethodKind::Power => Method::Power(base),
        MethodKind::Polyak => {
            let mut c = MomentumConfig::polyak(beta);
            c.eta = eta;
            c.eps = eps;
            c.max_iter = max_iter;
            c.seed = seed;
            Method::Momentum(c)
        }
        MethodKind::Nesterov => {
            let mut c = MomentumConfig::nesterov(beta);
            c.eta = eta;
            c.eps = eps;
            c.max_iter = max_iter;
            c.seed = seed;
            Method::Momentum(c)
        }
    }
}

fn cmd_solve(args: &SolveArgs, cfg: &FileConfig) -> Result<u8> {
    let seed = resolve_seed(args.seed, cfg);
    let eta = args.eta.or_else(|| cfg.get("eta")).unwrap_or(0.5);
    let eps = args.eps.or_else(|| cfg.get("eps")).unwrap_or(1e-8);
    let beta = args.beta.or_else(|| cfg.get("beta")).unwrap_or(0.8);
    let max_iter = args.max_iter.or_else(|| cfg.get("max_iter")).unwrap_or(500_000);
    let k = args
        .k
        .or_else(|| cfg.get("k"))
        .ok_or_else(|| Error::InvalidConfig("missing required --k".into()))?;
    let kind = MethodKind::parse(
        &args
            .method
            .clone()
            .or_else(|| cfg.get_string("method"))
            .unwrap_or_else(|| "gd".into()),
    )?;
    let method = build_method(kind, eta, eps, max_iter, seed, beta);

    let (input, fingerprint) = match (&args.input, &args.generate) {
        (Some(path), None) => (
            load_matrix_market(path)?,
            fingerprint_bytes(&fs::read(path)?),
        ),
        (None, Some(spec)) => {
            let gspec = parse_generate(spec, seed)?;
            let (m, _truth) = generate(&gspec)?;
            let fp = fingerprint_f64s(m.as_slice());
            (LoadedMatrix::Symmetric(m), fp)
        }
        _ => {
            return Err(Error::InvalidConfig(
                "exactly one of --input or --generate is required".into(),
            ))
        }
    };

    match input {
        LoadedMatrix::Symmetric(m) => {
            let result = solve_ksvd(&m, k, &method)?;
            if let Some(path) = &args.trace {
                write_solve_trace(&m, k, &method, path)?;
                write_solve_manifest(path, args, seed, eta, eps, k, &fingerprint)?;
            }
            if args.json {
                println!("{}", serde_json::to_string(&result).unwrap());
            } else {
                println!(
                    "method {}  converged {}  matvecs {}",
                    result.method, result.converged, result.total_matvecs
                );
                for (i, (p, it)) in result
                    .pairs
                    .iter()
                    .zip(&result.per_pair_iterations)
                    .enumerate()
                {
                    println!("  pair {i}: sigma = {:.12e}  iterations = {it}", p.sigma);
                }
            }
            Ok(if result.converged { 0 } else { 2 })
        }
        LoadedMatrix::General(nm) => {
            let strategy = match args
                .strategy
                .clone()
                .or_else(|| cfg.get_string("strategy"))
                .unwrap_or_else(|| "gram".into())
                .as_str()
            {
                "gram" => AsymStrategy::Gram,
                "dilation" => AsymStrategy::Dilation,
                other => {
                    return Err(Error::InvalidConfig(format!(
                        "unknown strategy '{other}' (gram, dilation)"
                    )))
                }
            };
            let result = solve_asymmetric(&nm, k, &method, strategy)?;
            if args.json {
                println!("{}", serde_json::to_string(&result).unwrap());
            } else {
                println!(
                    "method {}  strategy {}  converged {}",
                    result.method, result.strategy, result.converged
                );
                for (i, s) in result.sigma_hat.iter().enumerate() {
                    println!("  sigma {i}: {s:.12e}");
                }
            }
            Ok(if result.converged { 0 } else { 2 })
        }
    }
}

/// Re-runs the k = 1 solve with tracing and writes the CSV; accelerated
/// methods carry a trailing mode column.
fn write_solve_trace(
    m: &dyn LinearOperator,
    k: usize,
    method: &Method,
    path: &Path,
) -> Result<()> {
    if k != 1 {
        eprintln!("note: --trace records the first (k = 1) solve only");
    }
    let res = method.solve(m, None, true)?;
    let mode = match method {
        Method::Gd(_) | Method::Power(_) => None,
        _ => Some(method.label()),
    };
    write_trace_csv(fs::File::create(path)?, res.trace.as_ref().unwrap(), mode)
}

fn write_solve_manifest(
    trace_path: &Path,
    args: &SolveArgs,
    seed: u64,
    eta: f64,
    eps: f64,
    k: usize,
    fingerprint: &str,
) -> Result<()> {
    let command_line: Vec<String> = std::env::args().collect();
    let manifest = RunManifest::new(
        command_line.join(" "),
        serde_json::json!({
            "input": args.input.as_ref().map(|p| p.display().to_string()),
            "generate": args.generate,
            "k": k,
            "method": args.method,
            "eta": eta,
            "eps": eps,
            "seed": seed,
        }),
        seed,
        Some(fingerprint.to_string()),
    );
    fs::write(
        trace_path.with_extension("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )?;
    Ok(())
}

fn cmd_gapsweep(args: &GapsweepArgs, cfg: &FileConfig, command_line: &str) -> Result<u8> {
    let out_dir = args
        .out_dir
        .clone()
        .or_else(|| cfg.get_string("out_dir").map(PathBuf::from))
        .ok_or_else(|| Error::InvalidConfig("missing required --out-dir".into()))?;
    let mut params = SweepParams {
        seed: resolve_seed(args.seed, cfg),
        ..Default::default()
    };
    if let Some(s) = args.methods.clone().or_else(|| cfg.get_string("methods")) {
        params.methods = parse_method_list(&s)?;
    }
    if let Some(s) = args.n_list.clone().or_else(|| cfg.get_string("n_list")) {
        params.n_list = parse_usize_list(&s)?;
    }
    if let Some(s) = args.gaps.clone().or_else(|| cfg.get_string("gaps")) {
        params.gaps = parse_f64_list(&s)?;
    }
    if let Some(s) = args.beta_grid.clone().or_else(|| cfg.get_string("beta_grid")) {
        params.beta_grid = parse_f64_list(&s)?;
    }
    if let Some(v) = args.repeats.or_else(|| cfg.get("repeats")) {
        params.repeats = v;
    }
    if let Some(v) = args.eta.or_else(|| cfg.get("eta")) {
        params.eta = v;
    }
    if let Some(v) = args.eps.or_else(|| cfg.get("eps")) {
        params.eps = v;
    }
    if let Some(v) = args.max_iter.or_else(|| cfg.get("max_iter")) {
        params.max_iter = v;
    }
    if let Some(v) = args.jobs.or_else(|| cfg.get("jobs")) {
        params.jobs = v;
    }

    let report = run_gap_sweep(&params)?;
    for (method, fit) in &report.slopes {
        match fit {
            Some(f) => println!(
                "{method}: slope {:.4} (intercept {:.4}, {} cells)",
                f.slope, f.intercept, f.cells
            ),
            None => eprintln!("warning: no converged cells for {method}; slope absent"),
        }
    }
    let manifest = RunManifest::new(
        command_line,
        serde_json::json!({
            "gaps": params.gaps,
            "n_list": params.n_list,
            "methods": params.methods.iter().map(|m| m.label()).collect::<Vec<_>>(),
            "beta_grid": params.beta_grid,
            "repeats": params.repeats,
            "eta": params.eta,
            "eps": params.eps,
            "max_iter": params.max_iter,
            "seed": params.seed,
        }),
        params.seed,
        None,
    );
    sweep::write_sweep_outputs(&report, &out_dir, &manifest)?;
    println!("wrote {}", out_dir.display());
    Ok(0)
}

fn cmd_decaybench(args: &DecayArgs, cfg: &FileConfig, command_line: &str) -> Result<u8> {
    let out = args
        .out
        .clone()
        .or_else(|| cfg.get_string("out").map(PathBuf::from))
        .ok_or_else(|| Error::InvalidConfig("missing required --out".into()))?;
    let mut params = DecayParams {
        seed: resolve_seed(args.seed, cfg),
        ..Default::default()
    };
    if let Some(s) = args.families.clone().or_else(|| cfg.get_string("families")) {
        params.families = s
            .split(',')
            .map(|t| DecayFamily::parse(t.trim()))
            .collect::<Result<_>>()?;
    }
    if let Some(s) = args.n_list.clone().or_else(|| cfg.get_string("n_list")) {
        params.n_list = parse_usize_list(&s)?;
    }
    if let Some(s) = args.methods.clone().or_else(|| cfg.get_string("methods")) {
        params.methods = parse_method_list(&s)?;
    }
    if let Some(v) = args.repeats.or_else(|| cfg.get("repeats")) {
        params.repeats = v;
    }
    if let Some(v) = args.eta.or_else(|| cfg.get("eta")) {
        params.eta = v;
    }
    if let Some(v) = args.eps.or_else(|| cfg.get("eps")) {
        params.eps = v;
    }
    if let Some(v) = args.beta.or_else(|| cfg.get("beta")) {
        params.beta = v;
    }
    if let Some(v) = args.max_iter.or_else(|| cfg.get("max_iter")) {
        params.max_iter = v;
    }
    if let Some(v) = args.jobs.or_else(|| cfg.get("jobs")) {
        params.jobs = v;
    }
    params.k = args.k.or_else(|| cfg.get("k"));

    let rows = run_decay_bench(&params)?;
    fs::write(&out, decay::decay_to_csv(&rows))?;
    let manifest = RunManifest::new(
        command_line,
        serde_json::json!({
            "families": params.families.iter().map(|f| f.label()).collect::<Vec<_>>(),
            "n_list": params.n_list,
            "methods": params.methods.iter().map(|m| m.label()).collect::<Vec<_>>(),
            "repeats": params.repeats,
            "eta": params.eta,
            "eps": params.eps,
            "beta": params.beta,
            "max_iter": params.max_iter,
            "seed": params.seed,
            "k": params.k,
        }),
        params.seed,
        None,
    );
    fs::write(
        out.with_extension("manifest.json"),
        serde_json::to_string_pretty(&manifest).unwrap(),
    )?;
    println!("wrote {}", out.display());
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, cfg: &FileConfig) -> Result<u8> {
    let seed = resolve_seed(args.seed, cfg);
    let level = match args
        .level
        .clone()
        .or_else(|| cfg.get_string("level"))
        .unwrap_or_else(|| "fast".into())
        .as_str()
    {
        "fast" => VerifyLevel::Fast,
        "full" => VerifyLevel::Full,
        other => {
            return Err(Error::InvalidConfig(format!(
                "unknown level '{other}' (fast, full)"
            )))
        }
    };
    let results = run_suite(level, seed);
    let all = ksvd::bench::verify::report_suite(&results, std::io::stdout());
    Ok(if all { 0 } else { 1 })
}

fn run() -> Result<u8> {
    let command_line: Vec<String> = std::env::args().collect();
    let command_line = command_line.join(" ");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not usage errors.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return Ok(0);
            }
            eprint!("{e}");
            return Ok(64);
        }
    };
    let cfg = FileConfig::load(cli.config.as_deref())?;
    match &cli.command {
        Command::Solve(args) => cmd_solve(args, &cfg),
        Command::Gapsweep(args) => cmd_gapsweep(args, &cfg, &command_line),
        Command::Decaybench(args) => cmd_decaybench(args, &cfg, &command_line),
        Command::Verify(args) => cmd_verify(args, &cfg),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(Error::InvalidConfig(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(64)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
