use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplescore"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn fx(name: &str) -> String {
    fixtures().join(name).to_string_lossy().into_owned()
}

fn train_args(model: &Path) -> Vec<String> {
    let mut v: Vec<String> = ["train", "--config"].map(String::from).to_vec();
    v.push(fx("pipeline.conf"));
    v.extend(["--model".into(), model.to_string_lossy().into_owned()]);
    v.extend([
        "--predicate".into(),
        "nationality".into(),
        "--input".into(),
        fx("nationality.train.tsv"),
    ]);
    v.extend([
        "--predicate".into(),
        "profession".into(),
        "--input".into(),
        fx("profession.train.tsv"),
    ]);
    v
}

fn score_args(model: &Path, output: &Path, trace: bool) -> Vec<String> {
    let mut v: Vec<String> = vec!["score".into(), "--config".into(), fx("pipeline.conf")];
    v.extend(["--model".into(), model.to_string_lossy().into_owned()]);
    v.extend([
        "--predicate".into(),
        "nationality".into(),
        "--input".into(),
        fx("nationality.test.tsv"),
    ]);
    v.extend([
        "--predicate".into(),
        "profession".into(),
        "--input".into(),
        fx("profession.test.tsv"),
    ]);
    v.extend(["--output".into(), output.to_string_lossy().into_owned()]);
    if trace {
        v.push("--trace".into());
    }
    v
}

fn ok(args: &[String]) -> Output {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = run(&refs);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn train_score_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.txt");
    let report = ok(&train_args(&model));
    let report = String::from_utf8(report.stdout).unwrap();
    assert!(report.contains("accuracy2 = "), "{report}");
    assert_eq!(fs::read_to_string(&model).unwrap().lines().count(), 9);

    let scored = dir.path().join("scored.tsv");
    ok(&score_args(&model, &scored, false));
    let text = fs::read_to_string(&scored).unwrap();
    assert_eq!(text.lines().count(), 24);
    for line in text.lines() {
        let cols: Vec<&str> = line.split('\t').collect();
        assert_eq!(cols.len(), 3);
        assert!(cols[2] == "2" || cols[2] == "5", "{line}");
    }

    let truth = dir.path().join("truth.tsv");
    let mut t = fs::read_to_string(fixtures().join("nationality.train.tsv")).unwrap();
    t.push_str(&fs::read_to_string(fixtures().join("profession.train.tsv")).unwrap());
    fs::write(&truth, t).unwrap();
    let out = ok(&[
        "eval".into(),
        "--input".into(),
        scored.to_string_lossy().into_owned(),
        "--truth".into(),
        truth.to_string_lossy().into_owned(),
    ]);
    let out = String::from_utf8(out.stdout).unwrap();
    assert!(out.starts_with("accuracy2 = "), "{out}");
    assert!(out.contains("\nasd = "));
    assert!(out.contains("\nkendall_tau = "));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for i in 0..2 {
        let model = dir.path().join(format!("model{i}.txt"));
        let report = ok(&train_args(&model)).stdout;
        let scored = dir.path().join(format!("scored{i}.tsv"));
        ok(&score_args(&model, &scored, true));
        outputs.push((report, fs::read(&model).unwrap(), fs::read(&scored).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn eval_identity_and_singleton() {
    let dir = tempfile::tempdir().unwrap();
    let truth = fx("nationality.train.tsv");
    let out = ok(&["eval".into(), "--input".into(), truth.clone(), "--truth".into(), truth]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("accuracy2 = 100.00\nasd = 0.00\nkendall_tau = 1.00"),
        "{text}"
    );

    let pred = dir.path().join("p.tsv");
    let truth = dir.path().join("t.tsv");
    fs::write(&pred, "A\tX\t5\n").unwrap();
    fs::write(&truth, "A\tX\t7\n").unwrap();
    let out = ok(&[
        "eval".into(),
        "--input".into(),
        pred.to_string_lossy().into_owned(),
        "--truth".into(),
        truth.to_string_lossy().into_owned(),
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.starts_with("accuracy2 = 100.00\nasd = 2.00\nkendall_tau = undefined"),
        "{text}"
    );
}

#[test]
fn eval_key_mismatch_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let pred = dir.path().join("p.tsv");
    fs::write(&pred, "A\tX\t5\nA\tY\t2\n").unwrap();
    let truth = dir.path().join("t.tsv");
    fs::write(&truth, "A\tX\t7\nA\tZ\t2\n").unwrap();
    let out = run(&[
        "eval",
        "--input",
        pred.to_str().unwrap(),
        "--truth",
        truth.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("(A, Z)"));
}

#[test]
fn missing_model_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("out.tsv");
    let args = score_args(&dir.path().join("absent.txt"), &out_path, false);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = run(&refs);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["train", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(
        run(&[
            "score",
            "--predicate",
            "nationality",
            "--input",
            "x.tsv",
            "--predicate",
            "bogus"
        ])
        .status
        .code(),
        Some(1)
    );
    assert!(run(&["--help"]).status.success());
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.txt");
    let mut args = train_args(&model);
    args.extend([
        "--kg".into(),
        dir.path().join("missing.nt").to_string_lossy().into_owned(),
    ]);
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = run(&refs);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.nt"));

    let mut args = train_args(&model);
    args.extend(["--seed".into(), "7".into()]);
    ok(&args);
    assert!(fs::read_to_string(&model).unwrap().contains("seed = 7"));
}
