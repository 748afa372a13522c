//! End-to-end tests of the `perptail` binary: exit codes, output schemas,
//! and reproducibility of the artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_perptail"))
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn lognormal(dir: &Path) -> PathBuf {
    write(dir, "ln.json", r#"{"kind": "log_normal", "mu": -1.0, "sigma": 1.0}"#)
}

fn loggamma(dir: &Path) -> PathBuf {
    write(dir, "lg.json", r#"{"kind": "log_gamma", "gamma": 4.0, "beta": 1.0, "mu": 5.0}"#)
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}\nstderr: {}",
        out.status,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn alpha_reports_the_lognormal_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let model = lognormal(dir.path());
    let out_path = dir.path().join("alpha.json");
    run_ok(bin().args(["alpha", "--model"]).arg(&model).arg("--out").arg(&out_path));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let alpha = doc["result"]["solution"]["alpha"].as_f64().unwrap();
    assert!((alpha - 2.0).abs() < 1e-10);
    // the resolved spec is embedded for reproducibility
    assert_eq!(doc["spec"]["command"], "alpha");
    assert_eq!(doc["spec"]["model"]["kind"], "log_normal");
}

#[test]
fn malformed_json_exits_2_with_machine_readable_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{not json");
    let out = bin().args(["alpha", "--model"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr must be machine-readable JSON");
    assert_eq!(err["error"]["kind"], "validation");
}

#[test]
fn numerical_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // valid model, but no Cramér root: |X| <= 1/2 < 1 almost surely
    let model = write(
        dir.path(),
        "contract.json",
        r#"{"kind": "two_point", "a": 0.5, "b": 0.25, "p_a": 0.5}"#,
    );
    let out = bin().args(["alpha", "--model"]).arg(&model).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");
}

#[test]
fn tail_csv_schema_and_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let model = loggamma(dir.path());
    let csv1 = dir.path().join("curve1.csv");
    let csv2 = dir.path().join("curve2.csv");
    for csv in [&csv1, &csv2] {
        run_ok(
            bin()
                .args(["tail", "--model"])
                .arg(&model)
                .args(["--logx-min", "20", "--logx-max", "40", "--points-per-decade", "8"])
                .arg("--out")
                .arg(csv)
                .args(["--seed", "7"]),
        );
    }
    let a = std::fs::read_to_string(&csv1).unwrap();
    let b = std::fs::read_to_string(&csv2).unwrap();
    // golden schema row
    assert_eq!(
        a.lines().nth(2).unwrap(),
        "log_x,leading,normal_approx,tilted_exact,ratio_normal,ratio_tilted"
    );
    // identical payloads modulo the timestamp comment
    assert_eq!(
        perptail_cli::csvio::strip_comments(&a),
        perptail_cli::csvio::strip_comments(&b)
    );
    // spec header embeds the resolved run configuration
    assert!(a.lines().next().unwrap().contains("\"command\":\"tail\""));
}

#[test]
fn fig2a_svg_is_deterministic_and_two_panel() {
    let dir = tempfile::tempdir().unwrap();
    let model = loggamma(dir.path());
    let svg1 = dir.path().join("fig1.svg");
    let svg2 = dir.path().join("fig2.svg");
    for svg in [&svg1, &svg2] {
        run_ok(
            bin()
                .args(["fig2a", "--model"])
                .arg(&model)
                .args(["--logx-min", "20", "--logx-max", "60", "--points-per-decade", "6"])
                .arg("--out")
                .arg(svg),
        );
    }
    let a = std::fs::read_to_string(&svg1).unwrap();
    assert_eq!(a, std::fs::read_to_string(&svg2).unwrap());
    assert!(a.starts_with("<svg"));
    assert!(a.contains("normal approximation ratio"));
    assert!(a.contains("exact series ratio"));
    // fig2a needs the exact-series panel, so non-log-gamma models are rejected
    let ln = lognormal(dir.path());
    let out = bin()
        .args(["fig2a", "--model"])
        .arg(&ln)
        .arg("--out")
        .arg(dir.path().join("nope.svg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn estimator_json_is_byte_identical_across_reruns() {
    // identical relative paths in separate working directories, so the
    // embedded spec (which echoes the output path) matches byte for byte
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    let mut payloads = Vec::new();
    for dir in &dirs {
        let model = write(
            dir.path(),
            "tp.json",
            r#"{"kind": "two_point", "a": 2.0, "b": 0.5, "p_a": 0.3333333333333333}"#,
        );
        run_ok(
            bin()
                .current_dir(dir.path())
                .args(["is-tail", "--model"])
                .arg(model.file_name().unwrap())
                .args(["--logx", "4", "--samples-per-n", "2000", "--seed", "99", "--workers", "2"])
                .args(["--out", "out.json"]),
        );
        payloads.push(std::fs::read(dir.path().join("out.json")).unwrap());
    }
    assert_eq!(payloads[0], payloads[1], "same seed/workers must give byte-identical JSON");
}

#[test]
fn simulate_y_reports_tail_points_and_honors_env_workers() {
    let dir = tempfile::tempdir().unwrap();
    let model = lognormal(dir.path());
    let out_path = dir.path().join("y.json");
    run_ok(
        bin()
            .args(["simulate-y", "--model"])
            .arg(&model)
            .args(["--paths", "50000", "--logx", "2,3", "--seed", "5"])
            .env("PERP_WORKERS", "2")
            .arg("--out")
            .arg(&out_path),
    );
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc["spec"]["workers"], 2);
    let points = doc["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 2);
    assert!(points[0]["p_upper"].as_f64().unwrap() > 0.0);
}

#[test]
fn per_n_csv_schema() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "tp.json",
        r#"{"kind": "two_point", "a": 2.0, "b": 0.5, "p_a": 0.3333333333333333}"#,
    );
    let per_n = dir.path().join("per_n.csv");
    run_ok(
        bin()
            .args(["is-tail", "--model"])
            .arg(&model)
            .args(["--logx", "3", "--samples-per-n", "1000", "--n-max", "5"])
            .arg("--per-n")
            .arg(&per_n),
    );
    let text = std::fs::read_to_string(&per_n).unwrap();
    assert_eq!(text.lines().nth(2).unwrap(), "n,value,std_error,n_samples");
    assert_eq!(text.lines().count(), 3 + 5);
}

#[test]
fn mv_alpha_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let ens = write(
        dir.path(),
        "diag.json",
        r#"{
            "d": 2,
            "entries": [
                [{"kind": "two_point", "a": 2.0, "b": 0.5, "p_a": 0.3333333333333333}, 0],
                [0, {"kind": "two_point", "a": 2.0, "b": 0.5, "p_a": 0.3333333333333333}]
            ]
        }"#,
    );
    let out_path = dir.path().join("mv.json");
    let out = run_ok(
        bin()
            .args(["mv-alpha", "--ensemble"])
            .arg(&ens)
            .args(["--depth", "12", "--samples", "60000", "--seed", "3", "--workers", "2"])
            .arg("--out")
            .arg(&out_path),
    );
    let line = String::from_utf8_lossy(&out.stdout);
    assert!(line.contains("alpha"), "summary: {line}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    let alpha = doc["result"]["alpha"].as_f64().unwrap();
    assert!(alpha > 0.5 && alpha < 1.5, "alpha = {alpha}");
}

#[test]
fn experiment_spec_round_trips() {
    let spec = perptail_cli::ExperimentSpec {
        command: "is-tail".into(),
        model: Some(serde_json::json!({"kind": "log_normal", "mu": -1.0, "sigma": 1.0})),
        ensemble: None,
        seed: 42,
        workers: 3,
        params: {
            let mut m = serde_json::Map::new();
            m.insert("logx".into(), serde_json::json!(4.0));
            m
        },
        outputs: vec!["out.json".into()],
    };
    let text = serde_json::to_string(&spec).unwrap();
    let back: perptail_cli::ExperimentSpec = serde_json::from_str(&text).unwrap();
    assert_eq!(spec, back);
    // unknown fields are rejected when reloading a spec
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["mystery"] = serde_json::json!(1);
    assert!(serde_json::from_value::<perptail_cli::ExperimentSpec>(v).is_err());
}

#[test]
fn format_csv_and_stdout_json_interfaces() {
    let dir = tempfile::tempdir().unwrap();
    let model = lognormal(dir.path());
    // no --out: the full document lands on stdout as JSON
    let out = run_ok(bin().args(["alpha", "--model"]).arg(&model));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((doc["result"]["solution"]["alpha"].as_f64().unwrap() - 2.0).abs() < 1e-10);

    // --format csv renders the artifact as a table with the spec header
    let csv_path = dir.path().join("ruin.csv");
    run_ok(
        bin()
            .args(["ruin", "--model"])
            .arg(&model)
            .args(["--logx", "5", "--paths", "5000", "--format", "csv"])
            .arg("--out")
            .arg(&csv_path),
    );
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(
        text.lines().nth(2).unwrap(),
        "log_x,value,std_error,n_samples,scaled_by_x_alpha"
    );
    assert!(text.lines().next().unwrap().starts_with("# spec: "));
}
