use std::path::Path;
use std::process::{Command, Output};

fn resil(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_resil")).args(args).current_dir(cwd).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    std::fs::write(dir.join(name), text).unwrap();
    name.to_string()
}

const SMALL_PERCOLATION: &str = r#"{
  "experiment": "percolation_sweep",
  "seed": 3,
  "replicates": 4,
  "percolation_sweep": {
    "generator": { "kind": "erdos_renyi", "n": 300, "mean_degree": 3.0 },
    "f_grid": [0.0, 0.2, 0.4, 0.6, 0.8],
    "path_pairs": 500,
    "threshold_cutoff": 0.05
  }
}"#;

#[test]
fn exit_codes_follow_the_error_class() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = write(d, "ok.json", SMALL_PERCOLATION);
    let syntax = write(d, "syntax.json", "{ \"experiment\": ");
    let unknown = write(d, "unknown.json", r#"{ "experiment": "avalanche", "avalanche": {} }"#);
    let extra = write(d, "extra.json", &SMALL_PERCOLATION.replace("\"seed\": 3", "\"seed\": 3, \"colour\": 1"));
    let bad_value = write(d, "bad.json", &SMALL_PERCOLATION.replace("[0.0, 0.2", "[0.2, 0.0"));
    let missing_input = write(
        d,
        "missing.json",
        r#"{ "experiment": "truth", "truth": { "assertions": "nowhere.csv", "n_sources": 3, "n_claims": 4 } }"#,
    );

    assert_eq!(code(&resil(&["validate", &ok], d)), 0);
    assert_eq!(code(&resil(&["validate", &syntax], d)), 2);
    assert_eq!(code(&resil(&["validate", &unknown], d)), 3);
    assert_eq!(code(&resil(&["validate", &extra], d)), 3);
    assert_eq!(code(&resil(&["validate", &bad_value], d)), 3);
    assert_eq!(code(&resil(&["run", &syntax, "--out", "o"], d)), 2);
    assert_eq!(code(&resil(&["run", &bad_value, "--out", "o"], d)), 3);
    assert_eq!(code(&resil(&["run", "absent.json", "--out", "o"], d)), 1);
    assert_eq!(code(&resil(&["run", &missing_input, "--out", "o"], d)), 1);
    let unknown_run = resil(&["run", &unknown], d);
    assert!(String::from_utf8_lossy(&unknown_run.stderr).contains("avalanche"));
}

#[test]
fn run_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let s = write(d, "s.json", SMALL_PERCOLATION);
    let out = resil(&["run", &s, "--out", "results", "--jobs", "2"], d);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(d.join("results/percolation.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("f,S_mean,S_std,L_mean,replicates"));
    assert_eq!(lines.next().unwrap().split(',').take(3).collect::<Vec<_>>(), ["0", "1", "0"]);
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("results/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "percolation_sweep");
    assert_eq!(manifest["seed"], 3);
    assert_eq!(manifest["jobs"], 2);
    assert_eq!(manifest["outputs"][0], "percolation.csv");
    assert!(manifest["summary"].get("empirical_threshold").is_some());
}

#[test]
fn output_is_independent_of_threads_and_seed_override_applies() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let s = write(d, "s.json", SMALL_PERCOLATION);
    for (out, jobs, seed) in [("a", "1", None), ("b", "3", None), ("c", "1", Some("4"))] {
        let mut args = vec!["run", &s, "--out", out, "--jobs", jobs];
        if let Some(seed) = seed {
            args.extend(["--seed", seed]);
        }
        assert_eq!(code(&resil(&args, d)), 0);
    }
    let read = |o: &str| std::fs::read(d.join(o).join("percolation.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert_ne!(read("a"), read("c"));
}

#[test]
fn zero_only_grid_gives_one_intact_row() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let s = write(
        d,
        "zero.json",
        r#"{ "experiment": "percolation_sweep", "replicates": 2,
             "percolation_sweep": { "generator": { "kind": "erdos_renyi", "n": 50, "mean_degree": 2.0 }, "f_grid": [0.0] } }"#,
    );
    assert_eq!(code(&resil(&["run", &s, "--out", "."], d)), 0);
    let csv = std::fs::read_to_string(d.join("percolation.csv")).unwrap();
    assert_eq!(csv, "f,S_mean,S_std,L_mean,replicates\n0,1,0,0,2\n");
}

#[test]
fn plot_checks_columns() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "curve.csv", "f,S_mean,S_std,L_mean,replicates\n0,1,0,0,1\n");
    write(d, "wrong.csv", "beta,f,S_std\n0,0,0\n");
    let ok = resil(&["plot", "curve.csv", "--kind", "percolation"], d);
    assert_eq!(code(&ok), 0);
    assert!(d.join("curve_plot.py").exists());
    let schema = resil(&["plot", "wrong.csv", "--kind", "beta"], d);
    assert_eq!(code(&schema), 3);
    assert!(String::from_utf8_lossy(&schema.stderr).contains("S_mean"));
    assert_eq!(code(&resil(&["plot", "curve.csv", "--kind", "heatmap"], d)), 3);
    assert_eq!(code(&resil(&["plot", "absent.csv", "--kind", "percolation"], d)), 1);
}
