use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcm-phantom"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_preset(dir: &Path) -> String {
    let o = bin(&["preset", "dolphin", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    dir.join("dolphin.toml").to_string_lossy().into_owned()
}

#[test]
fn markov_demo_reports_non_stochastic() {
    let o = bin(&["demo", "markov"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("verdict: not stochastic"));
    assert!(text.contains("A,0.26,0.24,0.2,0.7"));
}

#[test]
fn closure_demo_is_bipolar() {
    let o = bin(&["demo", "closure"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("every edge in [-1, 1]"));
}

#[test]
fn preset_run_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path());
    let o = bin(&["run", &cfg, "--format", "pgm"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(stdout(&o).contains("reproduces 3 of 3 target attractors"));
    let out = dir.path().join("results");
    for f in [
        "report.txt",
        "report.csv",
        "matrices/mixture.txt",
        "matrices/expert1.txt",
        "loss/expert2.csv",
        "rasters/mixture.pgm",
    ] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    assert!(!out.join("rasters/mixture.csv").exists());

    let replay = |name: &str| bin(&["replay", &cfg, "--expert", name, "--initial", "0,0,0,1,0"]);
    let a = replay("mixture");
    assert_eq!(a.status.code(), Some(0));
    assert!(stdout(&a).contains("limit_cycle(4)"));
    let raster = out.join("rasters/replay-mixture-00010.pgm");
    let first = fs::read(&raster).unwrap();
    assert_eq!(replay("mixture").status.code(), Some(0));
    assert_eq!(fs::read(&raster).unwrap(), first);
}

#[test]
fn seed_flag_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_preset(dir.path());
    let report = dir.path().join("results/report.csv");
    assert_eq!(
        bin(&["run", &cfg, "--seed", "9", "--threads", "2"])
            .status
            .code(),
        Some(0)
    );
    let a = fs::read_to_string(&report).unwrap();
    assert!(a.contains("scenario,train_seed,9"));
    assert_eq!(bin(&["run", &cfg, "--seed", "9"]).status.code(), Some(0));
    assert_eq!(fs::read_to_string(&report).unwrap(), a);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bin(&["demo", "nothing"]).status.code(), Some(2));

    let missing = dir.path().join("absent.toml");
    assert_eq!(
        bin(&["run", missing.to_str().unwrap()]).status.code(),
        Some(4)
    );

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "outputs = \"r\"\nnonsense = 1\n").unwrap();
    assert_eq!(bin(&["run", bad.to_str().unwrap()]).status.code(), Some(2));

    let cfg = write_preset(dir.path());
    let o = bin(&[
        "replay",
        &cfg,
        "--expert",
        "expert1",
        "--initial",
        "0,1,0,0,0",
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stderr).contains("expert1.txt"));

    let original = fs::read_to_string(&cfg).unwrap();
    fs::write(&cfg, original.replace("epochs = 800", "epochs = 0")).unwrap();
    assert_eq!(bin(&["run", &cfg]).status.code(), Some(2));

    let diverging = original
        .replace("learning_rate = 0.5", "learning_rate = 1000.0")
        .replace("clip_to_bipolar = true", "clip_to_bipolar = false");
    fs::write(&cfg, diverging).unwrap();
    assert_eq!(bin(&["run", &cfg]).status.code(), Some(3));
}
