use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nalgebra::DVector;
use opkern::experiments::{read_group_stats, read_instances, ExperimentConfig};
use opkern::kernels::KernelSpec;
use opkern::regnet::FitModel;
use serde_json::{json, Value};

fn opkern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opkern"))
        .args(args)
        .env("OPKERN_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, value: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(value).unwrap()).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn gaussian_spec() -> Value {
    json!({"family": "gaussian_psd", "s": [[2.0, 0.5], [0.5, 1.0]], "width": 0.7})
}

#[test]
fn gram_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &gaussian_spec());
    let pts = vec![vec![0.0], vec![0.4], vec![-0.9]];
    let points = write(dir.path(), "points.json", &json!(pts));
    let gram: Vec<Vec<f64>> = serde_json::from_value(stdout_json(&opkern(&["gram", s(&spec), s(&points)]))).unwrap();
    let expected = KernelSpec::from_json(&gaussian_spec().to_string())
        .unwrap()
        .gram(&pts)
        .unwrap()
        .to_rows();
    assert_eq!(gram, expected);
}

#[test]
fn fit_then_predict_reproduces_gram_times_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &gaussian_spec());
    let inputs = vec![vec![-0.8], vec![-0.3], vec![0.1], vec![0.6], vec![0.9]];
    let data = write(
        dir.path(),
        "data.json",
        &json!({
            "inputs": inputs,
            "outputs": [[0.1, 1.0], [0.4, 0.2], [-0.3, 0.0], [0.7, -0.5], [1.0, 0.3]]
        }),
    );
    let model_path = dir.path().join("model.json");
    let before = std::fs::read(&data).unwrap();
    let out = opkern(&["fit", s(&spec), s(&data), "--sigma", "0.01", "--out", s(&model_path)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&data).unwrap(), before);

    let model: FitModel = serde_json::from_str(&std::fs::read_to_string(&model_path).unwrap()).unwrap();
    assert_eq!(model.support, inputs);
    assert_eq!(model.sigma, 0.01);

    let points = write(dir.path(), "points.json", &json!(inputs));
    let predicted: Vec<Vec<f64>> =
        serde_json::from_value(stdout_json(&opkern(&["predict", s(&model_path), s(&points)]))).unwrap();
    let gram = model.spec.gram(&inputs).unwrap();
    let values = gram.as_matrix() * model.stacked_coeffs();
    let flat = DVector::from_iterator(values.len(), predicted.into_iter().flatten());
    assert!((flat - values).amax() <= 1e-10);
}

#[test]
fn check_refine_reports_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let term = |b: Value, f: Value| json!({"b": b, "psi": {"kind": "rank_one_set", "functions": [f]}});
    let b1 = json!([[1.0, 0.2], [0.2, 0.5]]);
    let b2 = json!([[0.3, 0.0], [0.0, 0.8]]);
    let x = json!({"kind": "monomial", "powers": [1]});
    let cos = json!({"kind": "cosine", "freq": [2.0]});
    let k = write(dir.path(), "k.json", &json!({"family": "finite_hs", "terms": [term(b1.clone(), x.clone())]}));
    let g = write(
        dir.path(),
        "g.json",
        &json!({"family": "finite_hs", "terms": [term(b1, x.clone()), term(b2.clone(), cos)]}),
    );
    let v = stdout_json(&opkern(&["check-refine", s(&k), s(&g), "--oracle"]));
    assert_eq!(v["holds"], json!(true));
    assert_eq!(v["nontrivial"], json!(true));
    assert_eq!(v["oracle"], json!(true));
    assert!(v["characterization"].is_string());

    let bad = write(dir.path(), "bad.json", &json!({"family": "finite_hs", "terms": [term(b2, x)]}));
    let v = stdout_json(&opkern(&["check-refine", s(&k), s(&bad)]));
    assert_eq!(v["holds"], json!(false));
    assert!(v.get("oracle").is_none());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "spec.json", &gaussian_spec());
    let missing = dir.path().join("nope.json");

    let out = opkern(&["gram", s(&spec), s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{not json").unwrap();
    assert_eq!(opkern(&["gram", s(&garbage), s(&spec)]).status.code(), Some(2));

    let data = write(dir.path(), "data.json", &json!({"inputs": [[0.0]], "outputs": [[1.0, 2.0]]}));
    assert_eq!(
        opkern(&["fit", s(&spec), s(&data), "--sigma", "0"]).status.code(),
        Some(2)
    );

    // Output dimension 3 against a 2×2 kernel.
    let wide = write(dir.path(), "wide.json", &json!({"inputs": [[0.0]], "outputs": [[1.0, 2.0, 3.0]]}));
    let out = opkern(&["fit", s(&spec), s(&wide), "--sigma", "0.1"]);
    assert_eq!(out.status.code(), Some(1));

    assert_eq!(opkern(&["--help"]).status.code(), Some(0));
    assert_eq!(opkern(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        opkern(&["exp", "--experiment", "3", "--out-dir", s(dir.path())]).status.code(),
        Some(2)
    );
}

#[test]
fn exp_writes_reports_and_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = write(
        dir.path(),
        "config.json",
        &json!({"dims": [2], "noise_levels": [0.1, 0.3], "sims_per_group": 3}),
    );
    let out_dir = dir.path().join("run");
    let out = opkern(&[
        "exp",
        "--experiment",
        "2",
        "--config",
        s(&config),
        "--out-dir",
        s(&out_dir),
        "--seed",
        "17",
        "--quad-points",
        "101",
        "--sigma-grid-size",
        "10",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let instances = read_instances(&out_dir.join("instances.csv")).unwrap();
    assert_eq!(instances.len(), 6);
    assert!(instances.iter().all(|r| r.experiment == 2 && r.n == 2));
    let groups = read_group_stats(&out_dir.join("group_stats.csv")).unwrap();
    assert_eq!(groups.len(), 2);
    assert_eq!(groups[0].kept + groups[0].outliers, 3);

    let resolved: ExperimentConfig =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("resolved_config.json")).unwrap()).unwrap();
    assert_eq!(resolved.base_seed, 17);
    assert_eq!(resolved.quad_points, 101);
    assert_eq!(resolved.sigma_grid.len(), 10);
    assert_eq!(resolved.m, 20);
    assert_eq!(resolved.noise_levels, vec![0.1, 0.3]);
}

#[test]
fn plot_matches_golden_svg() {
    let fixtures = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("scatter.svg");
    let out = opkern(&["plot", s(&fixtures.join("instances_small.csv")), s(&svg)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let expected = std::fs::read_to_string(fixtures.join("scatter_small.svg")).unwrap();
    assert_eq!(std::fs::read_to_string(&svg).unwrap(), expected);

    let missing = dir.path().join("absent.csv");
    assert_eq!(opkern(&["plot", s(&missing), s(&svg)]).status.code(), Some(2));
}
