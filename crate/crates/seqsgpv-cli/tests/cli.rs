//! End-to-end runs of the binary: exit codes, output files, schemas, and
//! reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqsgpv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(path: &Path, content: &str) {
    std::fs::write(path, content).unwrap();
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

const SIMULATE: &str = r#"
[design]
kind = "prism_one_sided"
direction = "benefit_positive"
equiv_bound = 0.15
meaningful_bound = 0.5

[plan]
wait = 10
step = 5
affirm = 0
cap = 60

[model]
outcome = "normal"
theta = 0.0
sd = 1.0

[run]
master_seed = 11
replicates = 300

[simulate]
effects = [0.0, 1.0]
"#;

#[test]
fn simulate_writes_csv_sidecar_and_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SIMULATE);
    let out = dir.path().join("out");

    let res = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let csv = read(&out.join("simulate.csv"));
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("design,theta,replicates,reject_rate,reject_se,"));
    assert_eq!(csv.lines().count(), 3, "one header plus one row per effect");
    assert!(csv.contains("prism1s_pos(0.15;0.5)"));

    let meta = read(&out.join("run_meta.toml"));
    assert!(meta.contains("schema = 1"));
    assert!(meta.contains("master_seed = 11"));
    assert!(meta.contains("config_sha256 = \""));

    let effective = read(&out.join("effective_config.toml"));
    assert!(effective.contains("interval_level = 0.95"));
    assert!(effective.contains("randomization = \"alternating\""));
}

#[test]
fn worker_count_never_changes_the_csv_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SIMULATE);

    let mut bodies = Vec::new();
    for workers in ["1", "4"] {
        let out = dir.path().join(format!("out{workers}"));
        let res = run(&[
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--workers",
            workers,
        ]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
        bodies.push(std::fs::read(out.join("simulate.csv")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn seed_override_is_applied_and_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SIMULATE);

    let base = dir.path().join("base");
    let reseeded = dir.path().join("reseeded");
    for (out, extra) in [(&base, None), (&reseeded, Some("99"))] {
        let mut args = vec![
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ];
        if let Some(seed) = extra {
            args.extend(["--seed", seed]);
        }
        let res = run(&args);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }

    assert_ne!(
        std::fs::read(base.join("simulate.csv")).unwrap(),
        std::fs::read(reseeded.join("simulate.csv")).unwrap(),
        "a different seed must change the results"
    );
    assert!(read(&reseeded.join("run_meta.toml")).contains("master_seed = 99"));
    assert!(read(&reseeded.join("effective_config.toml")).contains("master_seed = 99"));
}

#[test]
fn a_run_is_reproducible_from_its_effective_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SIMULATE);

    let first = dir.path().join("first");
    let res = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        first.to_str().unwrap(),
        "--seed",
        "1234",
    ]);
    assert!(res.status.success());

    let second = dir.path().join("second");
    let res = run(&[
        "simulate",
        "--config",
        first.join("effective_config.toml").to_str().unwrap(),
        "--out",
        second.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    assert_eq!(
        std::fs::read(first.join("simulate.csv")).unwrap(),
        std::fs::read(second.join("simulate.csv")).unwrap()
    );
}

#[test]
fn sgpv_prints_the_evaluation() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[design]
kind = "prism_one_sided"
direction = "benefit_positive"
equiv_bound = 0.15
meaningful_bound = 0.5

[sgpv]
interval = [0.2, 0.4]
"#,
    );
    let res = run(&["sgpv", "--config", cfg.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("sgpv_null_side = 0\n"), "{stdout}");
    assert!(stdout.contains("sgpv_meaningful_side = 0\n"), "{stdout}");
    assert!(stdout.contains("alert = Both"), "{stdout}");
    assert!(stdout.contains("category = MildEffect"), "{stdout}");
    assert!(stdout.contains("reject_null = true"), "{stdout}");
}

#[test]
fn trajectory_csv_has_the_pinned_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[design]
kind = "prism_one_sided"
direction = "benefit_positive"
equiv_bound = 0.15
meaningful_bound = 0.5

[plan]
wait = 6
step = 4
affirm = 0
cap = "unrestricted"

[model]
outcome = "normal"
theta = 0.0
sd = 1.0

[run]
master_seed = 3
replicates = 200
ceiling = 60

[trajectory]
w_grid = [6, 10]
n_grid = [10, 30]
"#,
    );
    let out = dir.path().join("out");
    let res = run(&[
        "trajectory",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = read(&out.join("trajectory.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "design,W,S,A,N,type1_error,mc_se,avg_n"
    );
    assert_eq!(lines.count(), 4, "two waits times two caps");
}

#[test]
fn reversals_at_zero_lag_report_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[design]
kind = "prism_one_sided"
direction = "benefit_positive"
equiv_bound = 0.15
meaningful_bound = 0.5

[plan]
wait = 10
step = 5
affirm = 0
cap = 40

[model]
outcome = "normal"
theta = 0.0
sd = 1.0

[run]
master_seed = 5
replicates = 200

[reversals]
lag_grid = [0, 5]
"#,
    );
    let out = dir.path().join("out");
    let res = run(&[
        "reversals",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = read(&out.join("reversals.csv"));
    let lag0: Vec<&str> = csv
        .lines()
        .find(|l| l.split(',').nth(1) == Some("0"))
        .unwrap()
        .split(',')
        .collect();
    // reject_to_accept and accept_to_reject are both impossible without lag
    assert_eq!(lag0[2], "0");
    assert_eq!(lag0[4], "0");
}

#[test]
fn calibrate_reports_the_chosen_wait() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[design]
kind = "prism_one_sided"
direction = "benefit_positive"
equiv_bound = 0.15
meaningful_bound = 0.5

[plan]
wait = 6
step = 2
affirm = 0
cap = 30

[model]
outcome = "normal"
theta = 0.0
sd = 1.0

[run]
master_seed = 8
replicates = 100

[calibrate]
alpha_target = 1.0
w_grid = [6, 14]
"#,
    );
    let out = dir.path().join("out");
    let res = run(&[
        "calibrate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("chosen W = 6"), "{stdout}");
    let csv = read(&out.join("calibrate.csv"));
    assert!(csv.starts_with(
        "design,alpha_target,W,analyzed_n,type1_error,mc_se,avg_n,non_monotone,chosen\n"
    ));
}

#[test]
fn bootstrap_models_ingest_a_pool_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        &SIMULATE
            .replace("outcome = \"normal\"", "outcome = \"bootstrap\"")
            .replace("sd = 1.0\n", ""),
    );
    let pool = dir.path().join("pool.txt");
    let values: Vec<String> = (0..100).map(|i| format!("{}", (i as f64) / 25.0 - 2.0)).collect();
    write(&pool, &(values.join("\n") + "\n"));

    let out = dir.path().join("out");
    let res = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--pool",
        pool.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let stdout = String::from_utf8(res.stdout).unwrap();
    assert!(stdout.contains("100 outcomes"), "{stdout}");
    assert!(out.join("simulate.csv").exists());
}

#[test]
fn failure_classes_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // config error: a required key is missing
    let broken = dir.path().join("broken.toml");
    write(&broken, &SIMULATE.replace("master_seed = 11\n", ""));
    let res = run(&["simulate", "--config", broken.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("run.master_seed"));

    // data error: a malformed pool row
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        &SIMULATE
            .replace("outcome = \"normal\"", "outcome = \"bootstrap\"")
            .replace("sd = 1.0\n", ""),
    );
    let pool = dir.path().join("pool.txt");
    write(&pool, "1.0\nabc\n");
    let res = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--pool",
        pool.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 2"));

    // runtime error: output dir nested under a regular file
    let good_pool = dir.path().join("good_pool.txt");
    write(&good_pool, "1.0\n2.0\n3.0\n");
    let blocker = dir.path().join("blocker");
    write(&blocker, "file");
    let res = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--pool",
        good_pool.to_str().unwrap(),
        "--out",
        blocker.join("out").to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(4));

    // missing --config is a config error
    let res = run(&["simulate"]);
    assert_eq!(res.status.code(), Some(2));
}
