use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use airsense::audio::{write_wav, AudioClip};

const BIN: &str = env!("CARGO_BIN_EXE_airsense");

fn scene(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenes").join(name)
}

fn airsense(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn airsense")
}

fn ok(args: &[&str]) -> String {
    let out = airsense(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_owned()
}

/// synth, features, train both models, predict. Returns the artifact names.
fn workflow(dir: &Path) -> Vec<&'static str> {
    let demo = scene("demo.toml");
    ok(&["synth", "--spec", demo.to_str().unwrap(), "--out", &p(dir, "a.wav"), "--labels", &p(dir, "a.labels.csv")]);
    ok(&["features", "--in", &p(dir, "a.wav"), "--labels", &p(dir, "a.labels.csv"), "--out", &p(dir, "a.feat.csv")]);
    for (task, model) in [("regress", "r.json"), ("classify", "c.json")] {
        ok(&["train", "--task", task, "--features", &p(dir, "a.feat.csv"), "--model", &p(dir, model), "--trees", "20"]);
    }
    ok(&[
        "predict",
        "--model-r",
        &p(dir, "r.json"),
        "--model-c",
        &p(dir, "c.json"),
        "--in",
        &p(dir, "a.wav"),
        "--out",
        &p(dir, "preds.csv"),
    ]);
    vec!["a.wav", "a.labels.csv", "a.feat.csv", "r.json", "c.json", "preds.csv", "preds.mps.csv"]
}

#[test]
fn workflow_runs_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for f in workflow(d) {
        assert!(d.join(f).exists(), "{f}");
    }
    let preds = std::fs::read_to_string(d.join("preds.csv")).unwrap();
    assert_eq!(preds.lines().next(), Some("t_ms,vent_prob,airflow_naive"));
    let smoothed = std::fs::read_to_string(d.join("preds.mps.csv")).unwrap();
    assert_eq!(smoothed.lines().next(), Some("batch,span_ms,airflow_mps"));

    let eval = ok(&["eval", "--in", &p(d, "preds.csv"), "--labels", &p(d, "a.labels.csv")]);
    assert!(eval.starts_with("# eval"), "{eval}");
    assert!(eval.contains("mse"), "{eval}");
    let eval = ok(&["eval", "--model", &p(d, "c.json"), "--features", &p(d, "a.feat.csv")]);
    assert!(eval.contains("accuracy"), "{eval}");
}

#[test]
fn workflow_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let names = workflow(a.path());
    workflow(b.path());
    for f in names {
        let x = std::fs::read(a.path().join(f)).unwrap();
        let y = std::fs::read(b.path().join(f)).unwrap();
        assert!(x == y, "{f} differs between runs");
    }
}

#[test]
fn privacy_and_sweep_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let speech = scene("speech.toml");
    ok(&["synth", "--spec", speech.to_str().unwrap(), "--out", &p(d, "s.wav"), "--labels", &p(d, "s.labels.csv")]);
    let report = ok(&["privacy", "--in", &p(d, "s.wav"), "--out", &p(d, "s.lp.wav")]);
    assert!(report.contains("attenuation above split"), "{report}");
    assert!(d.join("s.lp.wav").exists());

    let demo = scene("demo.toml");
    let demo = demo.to_str().unwrap();
    let out = ok(&[
        "sweep",
        "--spec",
        demo,
        "--test-spec",
        demo,
        "--cutoff",
        "250,500",
        "--trees",
        "5",
        "--out",
        &p(d, "sweep.csv"),
    ]);
    assert!(out.starts_with("# sweep"));
    let csv = std::fs::read_to_string(d.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(rows.len(), 3, "{csv}");
    assert!(rows[1].starts_with("250") && rows[2].starts_with("500"), "{csv}");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(airsense(&[]).status.code(), Some(2));
    assert_eq!(airsense(&["train", "--task", "fly", "--features", "x", "--model", "m"]).status.code(), Some(2));
    assert_eq!(airsense(&["features", "--in", "/no/such.wav", "--out", "x"]).status.code(), Some(2));
    assert_eq!(airsense(&["predict", "--no-mps", "--mps", "n=25,p=5,eps=0.5"]).status.code(), Some(2));
    assert_eq!(airsense(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_model_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write_wav(d.join("q.wav"), &AudioClip::new(16_000, vec![0; 4096])).unwrap();
    let out = airsense(&[
        "predict",
        "--model-r",
        &p(d, "none.json"),
        "--model-c",
        &p(d, "none.json"),
        "--in",
        &p(d, "q.wav"),
        "--out",
        &p(d, "o.csv"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error[MODEL_NOT_FOUND]"));
}

#[test]
fn wrong_rate_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    workflow(d);
    write_wav(d.join("n.wav"), &AudioClip::new(8000, vec![0; 8000])).unwrap();
    let feat =
        airsense(&["features", "--in", &p(d, "n.wav"), "--labels", &p(d, "a.labels.csv"), "--out", &p(d, "o.csv")]);
    let pred = airsense(&[
        "predict",
        "--model-r",
        &p(d, "r.json"),
        "--model-c",
        &p(d, "c.json"),
        "--in",
        &p(d, "n.wav"),
        "--out",
        &p(d, "o.csv"),
    ]);
    for o in [feat, pred] {
        assert_eq!(o.status.code(), Some(1));
        assert!(String::from_utf8_lossy(&o.stderr).contains("error[RATE_MISMATCH]"));
    }
}
