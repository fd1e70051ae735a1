use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn ecr_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ecr-lab"))
        .args(args)
        .env_remove("ECR_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], "ecr-lab/1");
    v
}

fn close(v: &Value, want: f64, rel: f64) -> bool {
    (v.as_f64().unwrap() - want).abs() <= rel * want.abs()
}

#[test]
fn fit_bundled_data() {
    let v = json(&ecr_lab(&["fit", "--method", "ml", "--model", "ecr"]));
    assert_eq!(v["source"], "embedded:crowley-hu");
    assert!(close(&v["fit"]["params"]["beta"], 0.38669, 1e-3));
    assert!(close(&v["fit"]["params"]["lambda"], 80.68399, 1e-3));
    assert_eq!(v["fit"]["converged"], true);
}

#[test]
fn other_methods_and_models() {
    let v = json(&ecr_lab(&["fit", "--method", "csml"]));
    assert_eq!(v["fit"]["outcome"], "corrected");
    let v = json(&ecr_lab(&["fit", "--method", "pb"]));
    assert!(v["fit"]["std_errors"].is_null());
    let v = json(&ecr_lab(&["fit", "--model", "weibull"]));
    assert!(close(&v["fit"]["estimates"][0]["value"], 0.66923, 1e-3));
    let out = ecr_lab(&["fit", "--model", "gamma", "--method", "pb"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nonexistent_mean_is_a_numerical_failure() {
    let out = ecr_lab(&["moments", "--beta", "1", "--lambda", "1", "--r", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("moment does not exist for r ≥ 1"), "{err}");
}

#[test]
fn moments_report_requested_values() {
    let v = json(&ecr_lab(&[
        "moments", "--beta", "2", "--lambda", "3", "--r", "-0.5", "--x0", "1", "--order-stat", "2", "4",
        "--pwm", "1", "0",
    ]));
    for key in ["raw_moment", "log_moment", "median"] {
        assert!(v[key].is_f64(), "{key}");
    }
    for key in ["incomplete_moment", "order_stat_moment", "pwm"] {
        assert!(v[key]["value"].is_f64(), "{key}");
    }
    assert_eq!(v["window"], "-4 < r < 1");
}

#[test]
fn sampling_is_deterministic() {
    let args = ["sample", "--beta", "0.7", "--lambda", "2", "--n", "500", "--seed", "42"];
    let a = ecr_lab(&args);
    let b = ecr_lab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 501);
    let c = ecr_lab(&["sample", "--beta", "0.7", "--lambda", "2", "--n", "500", "--seed", "43"]);
    assert_ne!(text.as_bytes(), c.stdout.as_slice());
}

#[test]
fn sample_round_trips_through_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("draws.csv");
    let out = ecr_lab(&["sample", "--beta", "1.5", "--lambda", "0.8", "--n", "100000", "--seed", "7"]);
    assert!(out.status.success());
    // the header line is treated as a comment
    let body = String::from_utf8(out.stdout).unwrap().replacen("x\n", "# x\n", 1);
    std::fs::write(&path, body).unwrap();
    let v = json(&ecr_lab(&["fit", path.to_str().unwrap()]));
    let fit = &v["fit"];
    for (i, (key, truth)) in [("beta", 1.5), ("lambda", 0.8)].into_iter().enumerate() {
        let est = fit["params"][key].as_f64().unwrap();
        let se = fit["std_errors"][i].as_f64().unwrap();
        assert!((est - truth).abs() < 3.0 * se, "{key}: {fit}");
    }
}

#[test]
fn describe_bundled_and_single_value() {
    let v = json(&ecr_lab(&["describe"]));
    let s = &v["summary"];
    assert!((s["mean"].as_f64().unwrap() - 143.70).abs() < 0.02);
    assert_eq!(s["median"], 58.5);
    assert!((s["variance"].as_f64().unwrap() - 64506.42).abs() < 0.01);
    assert_eq!(s["min"], 1.0);
    assert_eq!(s["max"], 1386.0);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.txt");
    std::fs::write(&path, "5\n").unwrap();
    let v = json(&ecr_lab(&["describe", path.to_str().unwrap()]));
    for key in ["mean", "median", "min", "max"] {
        assert_eq!(v["summary"][key], 5.0);
    }
    assert!(v["summary"]["variance"].is_null());
    assert_eq!(v["variance_defined"], false);
}

#[test]
fn bad_input_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "# times\n3, 4\n-2\n").unwrap();
    let out = ecr_lab(&["describe", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let out = ecr_lab(&["fit", dir.path().join("missing").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reads_standard_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_ecr-lab"))
        .args(["ttt", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"1 2 3 10\n").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r_over_n,g");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[4], "1.0,1.0");
}

#[test]
fn gof_ranks_ecr_first() {
    let v = json(&ecr_lab(&["gof"]));
    let models = v["models"].as_array().unwrap();
    assert_eq!(models.len(), 6);
    assert_eq!(models[0]["model"], "ecr");
    assert!(v["lr_test_cr"]["p_value"].as_f64().unwrap() < 1e-5);
}

#[test]
fn simulate_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("study.json");
    std::fs::write(
        &cfg,
        r#"{"truth": {"beta": 0.5, "lambda": 0.6}, "sample_sizes": [20, 40],
            "replications": 40, "estimators": ["ML", "csml", "pb"], "master_seed": 9}"#,
    )
    .unwrap();
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_ecr-lab"))
            .args(["simulate", "--config", cfg.to_str().unwrap()])
            .env("ECR_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("4"));
    let text = String::from_utf8(one).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2);

    std::fs::write(&cfg, r#"{"truth": {"beta": -1, "lambda": 1}}"#).unwrap();
    let out = ecr_lab(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}
