//! Black-box tests of the `ksvd` binary: exit codes, JSON output,
//! determinism of emitted artifacts, config/env precedence, and CSV
//! round-trips.

use std::fs;
use std::process::{Command, Output};
use std::time::Instant;

use ksvd::bench::sweep::{fit_loglog, parse_report_csv};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ksvd"));
    c.env_remove("KSVD_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn ksvd")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn solve_generate_json_converges() {
    let out = run(&[
        "solve",
        "--generate",
        "rank2:n=100,gap=0.1",
        "--k",
        "1",
        "--method",
        "gd",
        "--seed",
        "1",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("json");
    assert_eq!(v["method"], "gd");
    assert_eq!(v["converged"], true);
    let sigma = v["pairs"][0]["sigma"].as_f64().unwrap();
    assert!((sigma - 1.0).abs() <= 1e-6, "sigma {sigma}");
    assert!(v["iterations"].as_array().unwrap().len() == 1);
    assert!(v["matvecs"].as_u64().unwrap() > 0);
}

#[test]
fn solve_rank1_is_fast() {
    let out = run(&[
        "solve",
        "--generate",
        "rank1:n=50,sigma=3",
        "--k",
        "1",
        "--seed",
        "2",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let iters = v["iterations"][0].as_u64().unwrap();
    assert!(iters <= 15, "rank-1 took {iters} iterations");
}

#[test]
fn missing_k_is_usage_error() {
    let out = run(&["solve", "--generate", "rank1:n=10,sigma=1"]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("--k"), "stderr: {err}");
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = run(&["solve", "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn non_convergence_exits_2() {
    let out = run(&[
        "solve",
        "--generate",
        "rank2:n=40,gap=0.001",
        "--k",
        "1",
        "--eps",
        "1e-14",
        "--max-iter",
        "50",
        "--seed",
        "0",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["converged"], false);
}

#[test]
fn solve_output_is_deterministic() {
    let args = [
        "solve",
        "--generate",
        "exp:n=60",
        "--k",
        "3",
        "--seed",
        "11",
        "--json",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn trace_file_and_manifest_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "solve",
        "--generate",
        "rank2:n=30,gap=0.2",
        "--k",
        "1",
        "--seed",
        "3",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.starts_with("t,norm_x,cos_theta1,heron_eps,grad_norm,eps_u,eps_sigma"));
    assert!(text.lines().count() > 3);

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("trace.manifest.json")).unwrap())
            .unwrap();
    assert!(manifest["input_fingerprint"].is_string());
    assert_eq!(manifest["seed"], 3);

    // Accelerated solves add the mode column.
    let out = run(&[
        "solve",
        "--generate",
        "rank2:n=30,gap=0.2",
        "--k",
        "1",
        "--seed",
        "3",
        "--method",
        "nesterov",
        "--beta",
        "0.8",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&trace).unwrap();
    assert!(text.lines().next().unwrap().ends_with(",mode"));
    assert!(text.lines().nth(1).unwrap().ends_with(",nesterov"));
}

#[test]
fn matrix_market_input_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.mtx");
    fs::write(
        &path,
        "%%MatrixMarket matrix array real symmetric\n2 2\n2.0\n1.0\n2.0\n",
    )
    .unwrap();
    let out = run(&[
        "solve",
        "--input",
        path.to_str().unwrap(),
        "--k",
        "2",
        "--seed",
        "0",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let s0 = v["pairs"][0]["sigma"].as_f64().unwrap();
    let s1 = v["pairs"][1]["sigma"].as_f64().unwrap();
    assert!((s0 - 3.0).abs() <= 1e-7);
    assert!((s1 - 1.0).abs() <= 1e-7);
}

#[test]
fn rectangular_input_uses_asymmetric_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.mtx");
    // diag(2, 1) padded to 2x3: singular values 2, 1.
    fs::write(
        &path,
        "%%MatrixMarket matrix coordinate real general\n2 3 2\n1 1 2.0\n2 2 1.0\n",
    )
    .unwrap();
    for strategy in ["gram", "dilation"] {
        let out = run(&[
            "solve",
            "--input",
            path.to_str().unwrap(),
            "--k",
            "2",
            "--seed",
            "0",
            "--strategy",
            strategy,
            "--json",
        ]);
        assert_eq!(out.status.code(), Some(0), "{strategy}");
        let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
        assert_eq!(v["strategy"], strategy);
        let s0 = v["sigma_hat"][0].as_f64().unwrap();
        let s1 = v["sigma_hat"][1].as_f64().unwrap();
        assert!((s0 - 2.0).abs() <= 1e-6, "{strategy}: {s0}");
        assert!((s1 - 1.0).abs() <= 1e-6, "{strategy}: {s1}");
    }
}

#[test]
fn malformed_input_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.mtx");
    fs::write(&path, "not a matrix market file\n").unwrap();
    let out = run(&["solve", "--input", path.to_str().unwrap(), "--k", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

/// Strips the trailing wallclock column(s) from a CSV for determinism
/// comparison.
fn strip_wallclock(csv: &str, cols_to_strip: usize) -> String {
    csv.lines()
        .map(|line| {
            let fields: Vec<&str> = line.split(',').collect();
            fields[..fields.len().saturating_sub(cols_to_strip)].join(",")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn gapsweep_outputs_are_deterministic_and_refittable() {
    let dir = tempfile::tempdir().unwrap();
    let d1 = dir.path().join("s1");
    let d2 = dir.path().join("s2");
    for d in [&d1, &d2] {
        let out = run(&[
            "gapsweep",
            "--methods",
            "gd,nesterov",
            "--n-list",
            "40",
            "--gaps",
            "0.3,0.1,0.03",
            "--beta-grid",
            "0.5,0.8",
            "--repeats",
            "2",
            "--seed",
            "0",
            "--out-dir",
            d.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
        for f in ["manifest.json", "raw.csv", "report.csv", "slopes.json"] {
            assert!(d.join(f).exists(), "{f} missing");
        }
    }

    // Byte-identical modulo wallclock columns and the manifest timestamp.
    let raw1 = strip_wallclock(&fs::read_to_string(d1.join("raw.csv")).unwrap(), 1);
    let raw2 = strip_wallclock(&fs::read_to_string(d2.join("raw.csv")).unwrap(), 1);
    assert_eq!(raw1, raw2);
    let rep1 = strip_wallclock(&fs::read_to_string(d1.join("report.csv")).unwrap(), 1);
    let rep2 = strip_wallclock(&fs::read_to_string(d2.join("report.csv")).unwrap(), 1);
    assert_eq!(rep1, rep2);
    assert_eq!(
        fs::read_to_string(d1.join("slopes.json")).unwrap(),
        fs::read_to_string(d2.join("slopes.json")).unwrap()
    );
    let m1: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d1.join("manifest.json")).unwrap()).unwrap();
    let m2: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d2.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m1["config"], m2["config"]);
    assert_eq!(m1["seed"], m2["seed"]);

    // Refitting the slope from the emitted report matches slopes.json.
    let rows = parse_report_csv(&fs::read_to_string(d1.join("report.csv")).unwrap()).unwrap();
    let slopes: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d1.join("slopes.json")).unwrap()).unwrap();
    for method in ["gd", "nesterov"] {
        let points: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| (r.gap, r.iterations_median))
            .collect();
        let refit = fit_loglog(&points).unwrap();
        let reported = slopes[method]["slope"].as_f64().unwrap();
        assert!(
            (refit.slope - reported).abs() <= 1e-9,
            "{method}: refit {} vs reported {reported}",
            refit.slope
        );
    }
}

#[test]
fn decaybench_writes_parseable_report() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("decay.csv");
    let out = run(&[
        "decaybench",
        "--families",
        "poly,lin",
        "--n-list",
        "32,64",
        "--methods",
        "gd,power",
        "--repeats",
        "2",
        "--seed",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with(
        "family,n,method,runtime_ms_mean,runtime_ms_std,eps_sigma_mean,eps_sigma_std,eps_uv_mean,eps_uv_std"
    ));
    let rows = ksvd::bench::decay::parse_decay_csv(&text).unwrap();
    assert_eq!(rows.len(), 2 * 2 * 2);
    for row in &rows {
        assert!(row.eps_uv_mean <= 1e-4, "{row:?}");
    }
    assert!(dir.path().join("decay.manifest.json").exists());
}

#[test]
fn ksvd_seed_env_is_a_fallback() {
    let args = [
        "solve",
        "--generate",
        "rank2:n=30,gap=0.3",
        "--k",
        "1",
        "--json",
    ];
    let with_env = |seed: &str| -> String {
        let mut c = bin();
        c.env("KSVD_SEED", seed).args(args);
        stdout(&c.output().unwrap())
    };
    assert_eq!(with_env("5"), with_env("5"));
    assert_ne!(with_env("5"), with_env("6"));

    // An explicit flag wins over the environment.
    let mut c = bin();
    c.env("KSVD_SEED", "6").args(args).arg("--seed").arg("5");
    assert_eq!(stdout(&c.output().unwrap()), with_env("5"));
}

#[test]
fn config_file_fills_missing_flags_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ksvd.conf");
    fs::write(&cfg, "# defaults for this test\nk=2\nseed=4\nmethod=power\n").unwrap();
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--generate",
        "exp:n=40",
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["method"], "power");
    assert_eq!(v["pairs"].as_array().unwrap().len(), 2);

    // Flag overrides the config value.
    let out = run(&[
        "solve",
        "--config",
        cfg.to_str().unwrap(),
        "--generate",
        "exp:n=40",
        "--k",
        "1",
        "--method",
        "gd",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["method"], "gd");
    assert_eq!(v["pairs"].as_array().unwrap().len(), 1);
}

#[test]
fn verify_fast_passes_within_a_minute() {
    let start = Instant::now();
    let out = run(&["verify", "--level", "fast", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(start.elapsed().as_secs() < 60);
    let text = stdout(&out);
    assert!(text.lines().all(|l| l.starts_with("PASS")));
    assert!(text.lines().count() > 20);
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("gapsweep"));
}
