use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_streammatch"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn run_hand_instance() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.txt");
    std::fs::write(&path, "p 2 2\nv 0 0 1\nv 1 1\n").unwrap();
    let (code, stdout, _) = run(&["run", path.to_str().unwrap(), "--passes", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["fractional_value"], 1.5);
    assert_eq!(v["opt_size"], 2);
    assert_eq!(v["fractional_ratio"], 0.75);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.txt");
    std::fs::write(&path, "p 1 1\nv 0 0\n").unwrap();
    assert_eq!(run(&["run", path.to_str().unwrap(), "--passes", "0"]).0, 2);
    let g = dir.path().join("g.txt");
    std::fs::write(&g, "g 1 3 0.2\na 0 3 interval 0 2\n").unwrap();
    assert_eq!(run(&["gap", g.to_str().unwrap(), "--epsilon", "0.6"]).0, 2);
    let (code, _, stderr) = run(&["run", dir.path().join("missing").to_str().unwrap(), "-k", "1"]);
    assert_ne!(code, 0);
    assert!(!stderr.is_empty());
    std::fs::write(&path, "p 1 1\nv 0 4\n").unwrap();
    let (code, _, stderr) = run(&["run", path.to_str().unwrap(), "-k", "1"]);
    assert_ne!(code, 0);
    assert!(stderr.contains("line 2"), "{stderr}");
}

#[test]
fn gen_is_deterministic_and_batches() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(&[
        "gen",
        "planted",
        "--n",
        "30",
        "--extra-prob",
        "0.1",
        "--seed",
        "5",
        "--order",
        "random",
    ]);
    let b = run(&[
        "gen",
        "planted",
        "--n",
        "30",
        "--extra-prob",
        "0.1",
        "--seed",
        "5",
        "--order",
        "random",
    ]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);
    let out = dir.path().join("p{seed}.txt");
    let (code, _, _) = run(&[
        "gen",
        "planted",
        "--n",
        "20",
        "--extra-prob",
        "0.1",
        "--seeds",
        "0..3",
        "-o",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let files: Vec<String> = (0..3)
        .map(|s| dir.path().join(format!("p{s}.txt")).to_str().unwrap().to_string())
        .collect();
    let mut args = vec!["run", "-k", "2", "--seeds", "0..2"];
    args.extend(files.iter().map(String::as_str));
    let (code, stdout, _) = bin_env_run(&args);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().count(), 6);
    for l in stdout.lines() {
        let v: serde_json::Value = serde_json::from_str(l).unwrap();
        assert!(v["fractional_ratio"].as_f64().unwrap() >= v["guarantee"].as_f64().unwrap());
    }
}

fn bin_env_run(args: &[&str]) -> (i32, String, String) {
    let out = bin().env("STREAMMATCH_THREADS", "2").args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn gap_yes_and_no() {
    let dir = tempfile::tempdir().unwrap();
    for (answer, want) in [("yes", "YES"), ("strong-no", "NO")] {
        let path = dir.path().join(format!("{answer}.txt"));
        let (code, _, err) = run(&[
            "gen",
            "lopsided",
            "--advertisers",
            "6",
            "--impressions",
            "1000000",
            "--max-budget",
            "4",
            "--answer",
            answer,
            "--seed",
            "3",
            "-o",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0, "{err}");
        let (code, stdout, _) = run(&["gap", path.to_str().unwrap(), "--out", "text"]);
        assert_eq!(code, 0);
        assert_eq!(stdout.lines().next(), Some(want));
        let (code, stdout, _) = run(&["gap", path.to_str().unwrap(), "--expect", "yes"]);
        let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
        assert_eq!(v["decision"], want);
        assert!(v["peak_active_set"].as_u64().unwrap() as f64 <= v["active_set_limit"].as_f64().unwrap());
        assert_eq!(code, if want == "YES" { 0 } else { 1 });
    }
}

#[test]
fn analyze_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.txt");
    let (code, _, _) = run(&[
        "gen",
        "planted",
        "--n",
        "40",
        "--extra-prob",
        "0.1",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    for k in ["1", "5"] {
        let (code, stdout, _) = run(&["analyze", path.to_str().unwrap(), "-k", k]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
        assert_eq!(v["bound_checked"], true);
        assert!(v["points"].as_array().unwrap().iter().all(|p| p["holds"] == true));
    }
    // no perfect matching: the bound is skipped with a warning
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "p 2 2\nv 0 0\nv 1 0\n").unwrap();
    let (code, stdout, stderr) = run(&["analyze", bad.to_str().unwrap(), "-k", "2"]);
    assert_eq!(code, 0);
    assert!(stderr.contains("warning"));
    let v: serde_json::Value = serde_json::from_str(stdout.trim()).unwrap();
    assert_eq!(v["bound_checked"], false);
    assert_eq!(
        run(&["analyze", bad.to_str().unwrap(), "-k", "2", "--require-perfect"]).0,
        1
    );
}

#[test]
fn selftest_passes() {
    let (code, stdout, _) = run(&["selftest"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn rational_mode_matches_float() {
    let (_, text, _) = run(&["gen", "upper-triangular", "--n", "6"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    std::fs::write(&path, text).unwrap();
    let f = run(&["run", path.to_str().unwrap(), "-k", "3"]).1;
    let r = run(&["run", path.to_str().unwrap(), "-k", "3", "--mode", "rational"]).1;
    let f: serde_json::Value = serde_json::from_str(f.trim()).unwrap();
    let r: serde_json::Value = serde_json::from_str(r.trim()).unwrap();
    assert!((f["fractional_value"].as_f64().unwrap() - r["fractional_value"].as_f64().unwrap()).abs() < 1e-12);
    assert_eq!(r["mode"], "rational");
}
