use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tickchain(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tickchain"))
        .args(args)
        .current_dir(dir)
        .env_remove("TICKCHAIN_OUTPUT_ROOT")
        .output()
        .expect("binary runs")
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("exited normally")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn all_files_end_with_newline(dir: &Path) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'), "{}", path.display());
    }
}

#[test]
fn version_names_code_and_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = tickchain(dir.path(), &["--version"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(env!("CARGO_PKG_VERSION")) && text.contains("output format"), "{text}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = tickchain(dir.path(), &["bogus"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
    assert_eq!(code(&tickchain(dir.path(), &["simulate"])), 2);
    assert_eq!(code(&tickchain(dir.path(), &["validate", "--n", "3", "--bogus"])), 2);
    assert_eq!(code(&tickchain(dir.path(), &["validate", "--n", "5"])), 2);
    assert_eq!(code(&tickchain(dir.path(), &["variance", "--config", "missing.json"])), 2);
}

#[test]
fn validate_writes_a_report_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = tickchain(dir.path(), &["validate", "--n", "3"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let run = dir.path().join("runs/validate");
    let report = json(&run.join("report.json"));
    assert!(report["max_covariance"].as_f64().unwrap() < 1e-8);
    let manifest = json(&run.join("manifest.json"));
    assert_eq!(manifest["subcommand"], "validate");
    assert_eq!(manifest["seed_source"], "random");
    assert!(manifest["seed"].is_u64());
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("drew"));
    all_files_end_with_newline(&run);
}

#[test]
fn outputs_are_not_clobbered_without_force() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["validate", "--n", "1", "--out", "v", "--seed", "4"];
    assert_eq!(code(&tickchain(dir.path(), &args)), 0);
    let out = tickchain(dir.path(), &args);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--force"));
    assert_eq!(code(&tickchain(dir.path(), &[&args[..], &["--force"]].concat())), 0);
}

#[test]
fn output_root_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_tickchain"))
        .args(["validate", "--n", "2", "--seed", "1"])
        .current_dir(dir.path())
        .env("TICKCHAIN_OUTPUT_ROOT", "elsewhere")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("elsewhere/validate/manifest.json").exists());
}

#[test]
fn optimized_chain_feeds_transport_variance_and_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let opt = ["optimize", "--n", "6", "--budget", "300", "--seed", "3"];
    assert_eq!(code(&tickchain(d, &[&opt[..], &["--out", "a", "--threads", "1"]].concat())), 0);
    assert_eq!(code(&tickchain(d, &[&opt[..], &["--out", "b", "--threads", "2"]].concat())), 0);
    let chain = std::fs::read_to_string(d.join("a/chain.json")).unwrap();
    assert_eq!(chain, std::fs::read_to_string(d.join("b/chain.json")).unwrap());
    assert_eq!(json(&d.join("a/manifest.json"))["seed_source"], "flag");

    assert_eq!(code(&tickchain(d, &["transport", "--config", "a/chain.json", "--out", "r"])), 0);
    let quad = ["transport", "--config", "a/chain.json", "--out", "q", "--method", "quadrature", "--energy-grid", "-1:1:5"];
    assert_eq!(code(&tickchain(d, &quad)), 0);
    let (r, q) = (json(&d.join("r/summary.json")), json(&d.join("q/summary.json")));
    assert_eq!(r["method"], "residue");
    let rel = |key: &str| (r[key].as_f64().unwrap() / q[key].as_f64().unwrap() - 1.0).abs();
    assert!(rel("J") < 1e-8 && rel("D") < 1e-6);
    let grid = std::fs::read_to_string(d.join("q/transmission.csv")).unwrap();
    assert_eq!(grid.lines().count(), 6);
    assert!(grid.starts_with("energy,transmission\n-1,"));

    assert_eq!(code(&tickchain(d, &["variance", "--config", "a/chain.json", "--out", "v", "--times", "log:1:100:3"])), 0);
    let variance = std::fs::read_to_string(d.join("v/variance.csv")).unwrap();
    assert!(variance.starts_with("t,var,slope\n"));
    assert_eq!(variance.lines().count(), 4);
    let summary = json(&d.join("v/summary.json"));
    assert!((summary["D"].as_f64().unwrap() / r["D"].as_f64().unwrap() - 1.0).abs() < 1e-6);

    let sim = ["simulate", "--config", "a/chain.json", "--ticks", "300", "--trajectories", "3", "--discard-first", "20"];
    assert_eq!(code(&tickchain(d, &[&sim[..], &["--out", "s1"]].concat())), 0);
    assert_eq!(code(&tickchain(d, &[&sim[..], &["--out", "s2", "--threads", "2"]].concat())), 0);
    for file in ["trajectory_0000.csv", "trajectory_0002.csv", "aggregate.json"] {
        assert_eq!(std::fs::read(d.join("s1").join(file)).unwrap(), std::fs::read(d.join("s2").join(file)).unwrap(), "{file}");
    }
    assert_eq!(json(&d.join("s1/manifest.json"))["seed_source"], "config");
    let aggregate = json(&d.join("s1/aggregate.json"));
    assert!(!aggregate["var_table"].as_array().unwrap().is_empty());
    all_files_end_with_newline(&d.join("s1"));
}

#[test]
fn asymptotics_prints_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = tickchain(dir.path(), &["asymptotics", "--what", "crossover", "--current", "0.3", "--diffusion", "0.001"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("current,diffusion,t_star,"), "{text}");
    assert_eq!(text.lines().count(), 2);
    let out = tickchain(dir.path(), &["asymptotics", "--what", "crossover", "--current", "0.3", "--diffusion", "1", "--out", "b"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn experiment_exit_code_follows_the_checks() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("ok.json"),
        r#"{"kind":"validate","sweep":{"n_sites":[2],"entropies":[3.0]},"samples":1,"seed":5,"output_dir":"ok"}"#,
    )
    .unwrap();
    assert_eq!(code(&tickchain(d, &["experiment", "--config", "ok.json", "--out", "ok"])), 0);
    assert!(d.join("ok/validation.csv").exists() && d.join("ok/summary.json").exists());
    assert_eq!(json(&d.join("ok/manifest.json"))["seed_source"], "config");

    std::fs::write(
        d.join("fail.json"),
        r#"{"kind":"scaling","sweep":{"n_sites":[3,4,5]},"samples":1,"seed":1,"output_dir":"f","optimizer":{"budget":300}}"#,
    )
    .unwrap();
    let out = tickchain(d, &["experiment", "--config", "fail.json", "--out", "f"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL fano_exponent"));
    assert!(d.join("f/manifest.json").exists());

    std::fs::write(d.join("bad.json"), r#"{"kind":"scaling","sweep":{"n_sites":[]},"samples":1,"seed":1,"output_dir":"x"}"#).unwrap();
    assert_eq!(code(&tickchain(d, &["experiment", "--config", "bad.json", "--out", "x"])), 2);
}
