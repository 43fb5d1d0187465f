use std::path::PathBuf;

use crlab_cli::run_command;
use serde_json::Value;

fn run(args: &[&str]) -> crlab_cli::RunOutput {
    run_env(args, None)
}

fn run_env(args: &[&str], env_seed: Option<&str>) -> crlab_cli::RunOutput {
    let argv: Vec<String> = std::iter::once("crlab").chain(args.iter().copied()).map(String::from).collect();
    run_command(&argv, env_seed)
}

fn json(out: &crlab_cli::RunOutput) -> Value {
    serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn weighted_identity_passes_with_zero_residual() {
    let out = run(&["verify", "lemma1", "--n", "1", "--m", "formal"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out);
    assert_eq!(v["command"], "verify");
    assert_eq!(v["results"][0]["status"], "pass");
    assert_eq!(v["results"][0]["value"], "zero");
    assert!(v["elapsed"].is_null());
}

#[test]
fn mutation_fails_with_a_witness() {
    let out = run(&["verify", "lemma1", "--n", "1", "--mutate", "c1+1"]);
    assert_eq!(out.code, 1);
    let v = json(&out);
    assert_eq!(v["results"][0]["status"], "fail");
    assert!(!v["results"][0]["witness"].as_str().unwrap().is_empty());
}

#[test]
fn printed_sign_is_rejected_at_n_2() {
    assert_eq!(run(&["verify", "lemma1", "--n", "2", "--c5-sign", "plus"]).code, 1);
    assert_eq!(run(&["verify", "psi-squares", "--c5-sign", "plus"]).code, 1);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["verify", "nonsense"][..],
        &["verify", "lemma1", "--n", "0"],
        &["verify", "lemma1", "--m", "x"],
        &["verify", "lemma1", "--mutate", "c9+1"],
        &["verify", "unweighted", "--mutate", "c1+1"],
        &["verify", "lemma1", "--c5-sign", "sideways"],
        &["eval", "--expr", "(", "--at", "t=0"],
        &["eval", "--expr", "x3", "--at", "t=0", "--n", "2"],
        &["eval", "--expr", "x1", "--at", "q=1"],
        &["growth", "--q", "9", "--r", "0"],
        &["growth", "--q", "0", "--r", "0", "--grid", "1"],
        &["th2-check", "--q", "2.2"],
        &["solution-check", "--params", "/nonexistent/params.txt"],
        &["frobnicate"],
    ] {
        let out = run(args);
        assert_eq!(out.code, 2, "{args:?}: {}", out.stdout);
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn parse_error_reports_the_offset() {
    let out = run(&["eval", "--expr", "(", "--at", "t=0"]);
    assert!(out.stderr.contains("byte 1"), "{}", out.stderr);
}

#[test]
fn domain_error_is_a_failed_check() {
    let out = run(&["eval", "--expr", "log(x1)", "--at", "x1=-1"]);
    assert_eq!(out.code, 1);
    assert!(json(&out)["results"][0]["witness"].as_str().unwrap().contains("log"));
}

#[test]
fn eval_reports_jets_and_accepts_a_leading_minus() {
    let out = run(&["eval", "--expr", "-log(abs2(x1 + i*y1) + 1 + t^2)", "--at", "x1=1/2, t=1"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out);
    let names: Vec<&str> = v["results"].as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"jets") && names.contains(&"f"));
}

#[test]
fn volume_growth_example() {
    let out = run(&["growth", "--q", "0", "--r", "0", "--n", "2"]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let v = json(&out);
    let slope = v["results"][0]["value"].as_f64().unwrap();
    assert!((slope - 6.0).abs() <= 0.3, "{slope}");
    assert!(v["results"][0]["name"].as_str().unwrap().ends_with("<= 6"));
}

#[test]
fn growth_writes_csv() {
    let csv = scratch("series.csv");
    let out = run(&["growth", "--q", "0", "--r", "1", "--samples", "20000", "--grid", "16,32,64", "--csv", csv.to_str().unwrap()]);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("R,estimate,stderr\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn solution_check_from_a_params_file() {
    let params = scratch("params.txt");
    std::fs::write(&params, "# shifted member\nn = 1\nmu1_re = 1/2\nlambda_im = 1\nconvention = mu.z\n").unwrap();
    let out = run(&["solution-check", "--params", params.to_str().unwrap(), "--points", "10"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    let v = json(&out);
    assert_eq!(v["inputs"]["convention"], "mu.z");
    let mismatch = run(&["solution-check", "--params", params.to_str().unwrap(), "--n", "2"]);
    assert_eq!(mismatch.code, 2);
}

#[test]
fn wrong_pairing_fails_the_solution_check() {
    let params = scratch("zbar.txt");
    std::fs::write(&params, "n = 1\nmu1_re = 1/2\nmu1_im = 1/3\nlambda_im = 1\nconvention = mu.zbar\n").unwrap();
    let out = run(&["solution-check", "--params", params.to_str().unwrap(), "--points", "5"]);
    assert_eq!(out.code, 1);
    let v = json(&out);
    let failed = v["results"].as_array().unwrap().iter().find(|r| r["status"] == "fail").unwrap();
    assert!(failed["witness"].is_string());
}

#[test]
fn coefficient_bounds_pass() {
    let out = run(&["coeffs", "--samples", "3000"]);
    assert_eq!(out.code, 0);
    assert_eq!(json(&out)["inputs"]["m-max"], "99/100");
}

#[test]
fn integral_check_reports_the_hypothesis() {
    let out = run(&["th2-check", "--q", "3", "--samples", "50000", "--grid", "1,2,4,8"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
    assert_eq!(json(&out)["results"][0]["value"], "Quadratic");
}

#[test]
fn seed_precedence_flag_env_config_default() {
    let cfg = scratch("seed.cfg");
    std::fs::write(&cfg, "seed = 30\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let seed = |args: &[&str], env: Option<&str>| json(&run_env(args, env))["seed"].as_u64().unwrap();
    assert_eq!(seed(&["coeffs", "--samples", "10"], None), crlab_cli::DEFAULT_SEED);
    assert_eq!(seed(&["--config", cfg, "coeffs", "--samples", "10"], None), 30);
    assert_eq!(seed(&["--config", cfg, "coeffs", "--samples", "10"], Some("20")), 20);
    assert_eq!(seed(&["--seed", "10", "--config", cfg, "coeffs", "--samples", "10"], Some("20")), 10);
    assert_eq!(run_env(&["coeffs"], Some("abc")).code, 2);
}

#[test]
fn config_supplies_defaults_and_flags_override() {
    let cfg = scratch("defaults.cfg");
    std::fs::write(&cfg, "n = 2\nm = 1/2\n").unwrap();
    let v = json(&run(&["--config", cfg.to_str().unwrap(), "verify", "unweighted"]));
    assert_eq!(v["inputs"]["n"], "2");
    let v = json(&run(&["--config", cfg.to_str().unwrap(), "verify", "unweighted", "--n", "1"]));
    assert_eq!(v["inputs"]["n"], "1");
    let bad = scratch("bad.cfg");
    std::fs::write(&bad, "n = 1\nn = 2\n").unwrap();
    assert_eq!(run(&["--config", bad.to_str().unwrap(), "verify", "unweighted"]).code, 2);
}

#[test]
fn reports_are_byte_identical_and_timing_is_isolated() {
    let args = ["--seed", "4", "solution-check", "--n", "1", "--points", "5"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let timed = json(&run(&["--timing", "verify", "unweighted"]));
    assert!(timed["elapsed"].as_f64().is_some());
}

#[test]
fn out_file_gets_the_json_and_stdout_a_summary() {
    let path = scratch("report.json");
    let out = run(&["--out", path.to_str().unwrap(), "verify", "unweighted"]);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "verify");
    assert!(out.stdout.contains("pass"), "{}", out.stdout);
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["--version"]).code, 0);
}
