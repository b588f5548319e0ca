//! End-to-end tests of the `fraclog` binary: exit codes, file layout, and the
//! documented output formats.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fraclog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fraclog"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn capacity_config(x0: &str, steps: u64) -> String {
    format!(
        r#"{{
  "model": "quadratic_capacity", "r": 0.5, "K": 2.0,
  "theta": 0.5, "mu": 0.5, "gamma": 1.0,
  "x0": {x0},
  "t0": 0.0, "t_end": 50.0, "steps": {steps},
  "scheme": "pece"
}}"#
    )
}

#[test]
fn simulate_multi_start_converges_to_capacity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "fig1.json", &capacity_config("[0.5, 1.0, 1.5, 2.5, 3.0]", 1000));
    let out_dir = dir.path().join("runs");
    let out = fraclog(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    let runs = summary.as_array().unwrap();
    assert_eq!(runs.len(), 5);
    for run in runs {
        assert_eq!(run["status"], "completed");
        let final_value = run["final_value"].as_f64().unwrap();
        assert!((final_value - 2.0).abs() <= 0.05, "final {final_value}");
        let csv = out_dir.join(run["csv"].as_str().unwrap());
        assert!(csv.exists(), "{csv:?}");
        let text = fs::read_to_string(csv).unwrap();
        assert!(text.starts_with("t,x\n"));
        assert_eq!(text.lines().count(), 1002); // header + N + 1 samples
    }
}

#[test]
fn simulate_from_equilibrium_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "eq.json", &capacity_config("2.0", 200));
    let out_dir = dir.path().join("runs");
    let out = fraclog(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    for line in text.lines().skip(1) {
        let x: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(x, 2.0);
    }
}

#[test]
fn identical_configs_give_byte_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "det.json", &capacity_config("[1.0, 3.0]", 300));
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    assert!(fraclog(&["simulate", "--config", &cfg, "--out", out_a.to_str().unwrap()]).status.success());
    assert!(fraclog(&["simulate", "--config", &cfg, "--out", out_b.to_str().unwrap()]).status.success());
    for name in ["trajectory_x0_1.csv", "trajectory_x0_3.csv", "summary.json"] {
        let a = fs::read(out_a.join(name)).unwrap();
        let b = fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn zero_steps_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", &capacity_config("1.0", 0));
    let out = fraclog(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("steps"));
}

#[test]
fn cubic_threshold_above_capacity_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad_cubic.json",
        r#"{"model":"cubic","r":1.0,"k":2.0,"m":2.5,"theta":0.5,"mu":0.5,"gamma":1.0,
            "x0":1.0,"t_end":1.0,"steps":10}"#,
    );
    let out = fraclog(&["stability", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_config_key_is_named_in_the_error() {
    let dir = tempfile::tempdir().unwrap();
    // `alpha` is the documented synonym that the config deliberately rejects
    let cfg = write_config(
        dir.path(),
        "alpha.json",
        r#"{"model":"quadratic","r":0.5,"alpha":0.5,"mu":0.5,"gamma":1.0,
            "x0":1.0,"t_end":1.0,"steps":10}"#,
    );
    let out = fraclog(&["simulate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn blow_up_exits_3_with_partial_flagged_output() {
    let dir = tempfile::tempdir().unwrap();
    // negative start of the plain quadratic model escapes to -infinity
    let cfg = write_config(
        dir.path(),
        "blowup.json",
        r#"{"model":"quadratic","r":0.5,"theta":0.5,"mu":0.5,"gamma":1.0,
            "x0":-1.0,"t_end":20.0,"steps":400}"#,
    );
    let out_dir = dir.path().join("runs");
    let out = fraclog(&["simulate", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));

    // the partial CSV is still written, and the summary carries the flag
    let text = fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(text.lines().count() > 1);
    assert!(text.lines().count() < 402, "partial trajectory expected");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary[0]["status"].as_str().unwrap().starts_with("non_finite_at_step"));
}

#[test]
fn sweep_gamma_settles_faster_for_larger_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sweep.json", &capacity_config("1.0", 1000));
    let out_dir = dir.path().join("runs");
    let out = fraclog(&[
        "sweep",
        "--config",
        &cfg,
        "--sweep",
        "gamma=1,2,3",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    for value in ["1", "2", "3"] {
        assert!(out_dir.join(format!("sweep_gamma_{value}.csv")).exists());
    }
    let table = fs::read_to_string(out_dir.join("sweep_summary.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "parameter,value,final_x,target_equilibrium,time_to_epsilon,status"
    );
    let settle_times: Vec<f64> = lines
        .map(|l| l.split(',').nth(4).unwrap().parse().expect("settle time present"))
        .collect();
    assert_eq!(settle_times.len(), 3);
    assert!(settle_times[0] > settle_times[1] && settle_times[1] > settle_times[2], "{settle_times:?}");
}

#[test]
fn sweep_of_length_one_degenerates_to_simulate_plus_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "one.json", &capacity_config("1.0", 300));
    let out_dir = dir.path().join("runs");
    let out = fraclog(&[
        "sweep", "--config", &cfg, "--sweep", "x0=1.5", "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out_dir.join("sweep_x0_1.5.csv").exists());
    let table = fs::read_to_string(out_dir.join("sweep_summary.csv")).unwrap();
    assert_eq!(table.lines().count(), 2); // header + one row
}

#[test]
fn sweep_rejects_unknown_parameter() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "sw.json", &capacity_config("1.0", 100));
    let out = fraclog(&["sweep", "--config", &cfg, "--sweep", "r=0.5,1.0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stability_reports_the_sign_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "stab.json",
        r#"{"model":"quadratic","r":0.5,"theta":0.5,"mu":0.5,"gamma":1.0,
            "x0":1.5,"t_end":1.0,"steps":10}"#,
    );
    let out_dir = dir.path().join("runs");
    let out = fraclog(&["stability", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0: unstable"), "{text}");
    assert!(text.contains("1: asymptotically stable"), "{text}");

    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("stability.json")).unwrap()).unwrap();
    let entries = json["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    // perturbation about the stable point decays through the sample times
    let samples = entries[1]["alpha_samples"].as_array().unwrap();
    let mags: Vec<f64> = samples.iter().map(|s| s["alpha"].as_f64().unwrap().abs()).collect();
    assert!(mags.windows(2).all(|w| w[0] > w[1]), "{mags:?}");
}

#[test]
fn stability_three_line_classification_for_cubic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cubic.json",
        r#"{"model":"cubic","r":1.0,"k":2.0,"m":0.5,"theta":0.5,"mu":0.5,"gamma":1.0,
            "x0":1.0,"t_end":1.0,"steps":10}"#,
    );
    let out = fraclog(&["stability", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0: asymptotically stable"), "{text}");
    assert!(text.contains("0.5: unstable"), "{text}");
    assert!(text.contains("2: asymptotically stable"), "{text}");
}

#[test]
fn existence_worked_example_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    // r (1 + 2L) = 0.25 * 4 = 1 exactly, reproducing the A = 1 example
    let cfg = write_config(
        dir.path(),
        "exist.json",
        r#"{"model":"quadratic","r":0.25,"theta":0.5,"mu":0.5,"gamma":1.0,
            "x0":1.0,"t0":0.0,"t_end":1.0,"steps":10}"#,
    );
    let out = fraclog(&["existence", "--config", &cfg, "--L", "1.5", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let c1_line = text.lines().find(|l| l.trim_start().starts_with("C1 = ")).unwrap();
    let c1: f64 = c1_line.trim().trim_start_matches("C1 = ").parse().unwrap();
    let expected = 1.0 / std::f64::consts::PI.sqrt() + 0.5;
    assert!((c1 - expected).abs() <= 1e-12, "C1 = {c1}");
    assert!(text.contains("satisfied: false"), "{text}");

    // shorter horizon flips the flag
    let cfg2 = write_config(
        dir.path(),
        "exist2.json",
        r#"{"model":"quadratic","r":0.25,"theta":0.5,"mu":0.5,"gamma":1.0,
            "x0":1.0,"t0":0.0,"t_end":0.5,"steps":10}"#,
    );
    let out2 = fraclog(&["existence", "--config", &cfg2, "--L", "1.5", "--out", dir.path().to_str().unwrap()]);
    assert!(out2.status.success());
    assert!(stdout(&out2).contains("satisfied: true"));
}

#[test]
fn existence_mu1_branch_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "mu1.json",
        r#"{"model":"quadratic","r":0.25,"theta":0.5,"mu":0.5,"gamma":1.0,
            "x0":1.0,"t_end":1.0,"steps":10}"#,
    );
    let out = fraclog(&[
        "existence", "--config", &cfg, "--L", "1.5", "--mu1", "--out", dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("C2 ("));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("existence.json")).unwrap()).unwrap();
    assert!(json["mu1_condition_value"].is_number());
}

#[test]
fn ml_eval_reduces_to_exponential() {
    let out = fraclog(&[
        "ml-eval", "--theta", "1", "--beta", "1", "--rho", "1", "--lambda", "-0.3", "--z", "2",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let value_line = text.lines().find(|l| l.starts_with("value = ")).unwrap();
    let value: f64 = value_line.trim_start_matches("value = ").parse().unwrap();
    assert!((value - (-0.6f64).exp()).abs() <= 1e-13, "value = {value}");
    assert!(text.contains("converged = true"));
}

#[test]
fn ml_eval_rejects_singular_argument() {
    let out = fraclog(&[
        "ml-eval", "--theta", "0.5", "--beta", "0.5", "--rho", "1", "--lambda", "-1", "--z", "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_is_a_config_error() {
    let out = fraclog(&["simulate", "--config", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(2));
}
