use std::process::Command;
use std::time::Duration;

use nlkit_bench::*;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nlkit"));
    c.env_remove(SEED_ENV);
    c
}

fn strs(v: &[&str]) -> Vec<String> {
    v.iter().map(|s| s.to_string()).collect()
}

fn read_csv(path: &std::path::Path) -> (String, Vec<Vec<String>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn wp_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("wp.csv");
    let status = bin()
        .args([
            "wp",
            "--problems",
            "quadratic,test23/wood",
            "--algorithms",
            "newton-raphson,trust-region,klement",
            "--tols",
            "1e-2..1e-8",
            "--reps",
            "2",
            "--jobs",
            "3",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(
        header,
        "problem,algorithm,abstol,runtime_ns,resid_inf,retcode,nf,njac,nlinsolve"
    );
    assert_eq!(rows.len(), 2 * 3 * 7);
    for group in rows.chunks(7) {
        let tols: Vec<f64> = group.iter().map(|r| r[2].parse().unwrap()).collect();
        assert!(tols.windows(2).all(|w| w[1] < w[0]), "{tols:?}");
        assert!(group
            .iter()
            .all(|r| r[0] == group[0][0] && r[1] == group[0][1]));
    }
}

#[test]
fn wp_rows_remeasure_residual() {
    let config = WpConfig {
        problems: strs(&["quadratic", "test23/powell_singular", "test23/rosenbrock"]),
        algorithms: strs(&["newton-raphson", "broyden", "steepest-descent"]),
        tols: parse_tols("1e-3..1e-9").unwrap(),
        reps: 1,
        maxiters: 200,
        precond: None,
        seed: 0,
        jobs: 2,
    };
    let rows = cmd_wp(&config).unwrap();
    assert_eq!(rows.len(), 3 * 3 * 7);
    for r in &rows {
        let problem = load_problem(&r.problem).unwrap();
        let alg = load_algorithm(&r.algorithm, None, 0, &problem).unwrap();
        let opts = nlkit::SolveOptions::default()
            .with_abstol(r.abstol)
            .with_maxiters(200);
        let again = run(&alg, &problem, &opts).unwrap();
        let direct = nlkit::linalg::norm_inf(&problem.eval(&again.u_star));
        assert_eq!(r.resid_inf.to_bits(), direct.to_bits(), "{r:?}");
        if r.retcode == "Success" {
            assert!(r.resid_inf <= r.abstol, "{r:?}");
        } else {
            assert!(!(r.resid_inf <= r.abstol), "{r:?}");
        }
    }
    assert!(rows.iter().any(|r| r.retcode != "Success"));
}

#[test]
fn wp_newton_raphson_solves_suite() {
    let problems: Vec<String> = (1..=23)
        .map(|i| nlkit::problems::test23(i).unwrap().id)
        .collect();
    let config = WpConfig {
        problems,
        algorithms: strs(&["newton-raphson"]),
        tols: vec![1e-8],
        reps: 1,
        maxiters: 1000,
        precond: None,
        seed: 0,
        jobs: 4,
    };
    let rows = cmd_wp(&config).unwrap();
    assert_eq!(rows.iter().filter(|r| r.retcode == "Success").count(), 23);
}

#[test]
fn wp_deterministic_apart_from_runtime() {
    let mk = |jobs| WpConfig {
        problems: strs(&["quadratic", "generalized_rosenbrock?N=6"]),
        algorithms: strs(&[
            "newton-backtracking",
            "limited-memory-broyden",
            "newton-sparse",
        ]),
        tols: parse_tols("1e-2..1e-6").unwrap(),
        reps: 1,
        maxiters: 500,
        precond: None,
        seed: 3,
        jobs,
    };
    let strip = |rows: Vec<WpRow>| -> Vec<WpRow> {
        rows.into_iter()
            .map(|mut r| {
                r.runtime_ns = 0;
                r
            })
            .collect()
    };
    assert_eq!(
        strip(cmd_wp(&mk(1)).unwrap()),
        strip(cmd_wp(&mk(3)).unwrap())
    );
}

#[test]
fn wp_rejects_bad_config() {
    let base = WpConfig {
        problems: strs(&["quadratic"]),
        algorithms: strs(&["newton-raphson"]),
        tols: vec![1e-2, 1e-4],
        reps: 1,
        maxiters: 10,
        precond: None,
        seed: 0,
        jobs: 1,
    };
    let mut c = base.clone();
    c.tols = vec![1e-4, 1e-2];
    assert!(matches!(cmd_wp(&c), Err(BenchError::Config(_))));
    let mut c = base.clone();
    c.reps = 0;
    assert!(matches!(cmd_wp(&c), Err(BenchError::Config(_))));
    let mut c = base;
    c.algorithms = strs(&["no-such-method"]);
    assert!(matches!(cmd_wp(&c), Err(BenchError::UnknownAlgorithm(_))));
}

#[test]
fn scaling_row_count() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let status = bin()
        .args([
            "scaling",
            "--family",
            "generalized_rosenbrock",
            "--sizes",
            "4,8,16",
            "--algorithms",
            "newton-backtracking,newton-sparse",
            "--out",
        ])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let (header, rows) = read_csv(&out);
    assert_eq!(header, "size,algorithm,runtime_ns,resid_inf,retcode");
    assert_eq!(rows.len(), 3 * 2);
    assert!(rows.iter().all(|r| r[4] == "Success"));
}

#[test]
fn scaling_timeout_is_recorded() {
    let config = ScalingConfig {
        family: Family::Brusselator2d,
        sizes: vec![24],
        algorithms: strs(&["newton-dense"]),
        abstol: 1e-6,
        maxiters: 1000,
        timeout: Duration::from_millis(1),
        precond: None,
        seed: 0,
        jobs: 1,
    };
    let rows = cmd_scaling(&config).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].retcode, "Timeout");
    assert!(rows[0].resid_inf > 1e-6);
}

#[test]
fn scaling_sparse_beats_dense_at_32() {
    let config = ScalingConfig {
        family: Family::Brusselator2d,
        sizes: vec![8, 16, 32],
        algorithms: strs(&["newton-dense", "newton-sparse"]),
        abstol: 1e-6,
        maxiters: 100,
        timeout: Duration::from_secs(600),
        precond: None,
        seed: 0,
        jobs: 1,
    };
    let rows = cmd_scaling(&config).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(
        rows.iter()
            .all(|r| r.retcode == "Success" && r.resid_inf <= 1e-6),
        "{rows:?}"
    );
    let t = |alg: &str| {
        rows.iter()
            .find(|r| r.size == 32 && r.algorithm == alg)
            .unwrap()
            .runtime_ns
    };
    assert!(t("newton-sparse") < t("newton-dense"));
}

#[test]
fn solve_quadratic_prints_json() {
    let out = bin()
        .args(["solve", "quadratic", "newton-raphson"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["retcode"], "Success");
    let u: Vec<f64> = serde_json::from_value(v["result"]["u_star"].clone()).unwrap();
    assert!((u[0] - 2f64.sqrt()).abs() < 1e-10 && (u[1] - 5f64.sqrt()).abs() < 1e-10);
    assert!(v["result"]["stats"]["nf"].as_u64().unwrap() > 0);
}

#[test]
fn solve_brusselator_krylov() {
    let out = bin()
        .args([
            "solve",
            "brusselator2d?N=32",
            "newton-krylov",
            "--precond",
            "ilu0",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["resid_inf"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn solve_failure_exits_one() {
    let out = bin()
        .args([
            "solve",
            "test23/rosenbrock",
            "steepest-descent",
            "--maxiters",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["retcode"], "MaxIters");
}

#[test]
fn unknown_ids_exit_two() {
    for args in [
        ["solve", "no/such", "newton-raphson"],
        ["solve", "quadratic", "no-such"],
    ] {
        let out = bin().args(args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("unknown"));
    }
    let out = bin()
        .args([
            "scaling",
            "--family",
            "wood",
            "--algorithms",
            "newton-raphson",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_env_is_validated() {
    let out = bin()
        .env(SEED_ENV, "abc")
        .args(["solve", "quadratic", "newton-raphson"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .env(SEED_ENV, "42")
        .args(["solve", "quadratic", "newton-sparse"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn list_commands() {
    let out = bin().args(["list", "algorithms"]).output().unwrap();
    let names: Vec<String> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(names.len(), nlkit::solvers::ALGORITHM_NAMES.len());
    let out = bin().args(["list", "problems"]).output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), nlkit::list_problems().len());
    for line in text.lines() {
        let id = line.split('\t').next().unwrap();
        assert!(load_problem(id).is_ok(), "{id}");
    }
}
