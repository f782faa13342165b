use std::path::{Path, PathBuf};

use frameness::channels::validate_channel;
use frameness::cli::{run, EXIT_INPUT, EXIT_OK};
use frameness::io::{parse_channel, parse_state};
use serde_json::Value;
use tempfile::TempDir;

struct Out {
    code: u8,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let mut full = vec!["frameness"];
    full.extend_from_slice(args);
    let code = run(full, &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn fixtures() -> (TempDir, PathBuf, PathBuf, PathBuf) {
    let dir = TempDir::new().unwrap();
    let plus = write(
        dir.path(),
        "plus.json",
        r#"{"dim": 2, "weights": [0.5, 0.5]}"#,
    );
    let n0 = write(
        dir.path(),
        "n0.json",
        r#"{"dim": 2, "weights": [1.0, 0.0]}"#,
    );
    let w532 = write(
        dir.path(),
        "w532.json",
        r#"{"dim": 3, "weights": [0.5, 0.3, 0.2]}"#,
    );
    (dir, plus, n0, w532)
}

#[test]
fn monotone_examples() {
    let (_dir, plus, n0, w532) = fixtures();
    let out = cli(&["monotone", "--measure", "variance", "--state", s(&plus)]);
    assert_eq!(
        (out.code, out.stdout.as_str()),
        (EXIT_OK, "1.000000000000\n")
    );
    let out = cli(&[
        "monotone",
        "--measure",
        "concurrence",
        "--k",
        "2",
        "--state",
        s(&n0),
    ]);
    assert_eq!(out.stdout, "0.000000000000\n");
    let out = cli(&[
        "monotone",
        "--measure",
        "vidal",
        "--k",
        "2",
        "--state",
        s(&w532),
    ]);
    assert_eq!(out.stdout, "0.500000000000\n");
    let out = cli(&["monotone", "--measure", "entropy", "--state", s(&plus)]);
    assert_eq!(out.stdout, "1.000000000000\n");
}

#[test]
fn monotone_accepts_pure_density_and_sectored_files() {
    let dir = TempDir::new().unwrap();
    let rho = write(
        dir.path(),
        "rho.json",
        r#"{"dim": 2, "matrix": [[[0.5, 0], [0, -0.5]], [[0, 0.5], [0.5, 0]]]}"#,
    );
    let out = cli(&["monotone", "--measure", "variance", "--state", s(&rho)]);
    assert_eq!(
        (out.code, out.stdout.as_str()),
        (EXIT_OK, "1.000000000000\n"),
        "{}",
        out.stderr
    );

    let sect = write(
        dir.path(),
        "sect.json",
        r#"{"dim": 2, "sectors": [{"n": 0, "amplitudes": [[0.5, 0], [0, 0.5]]}, {"n": 1, "amplitudes": [[0.7071067811865476, 0]]}]}"#,
    );
    let out = cli(&[
        "monotone",
        "--measure",
        "concurrence",
        "--k",
        "2",
        "--state",
        s(&sect),
    ]);
    assert_eq!(out.stdout, "1.000000000000\n", "{}", out.stderr);
}

#[test]
fn monotone_input_errors() {
    let dir = TempDir::new().unwrap();
    let mixed = write(
        dir.path(),
        "mixed.json",
        r#"{"dim": 2, "matrix": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#,
    );
    let junk = write(dir.path(), "junk.json", "{ not json");
    let plus = write(
        dir.path(),
        "plus.json",
        r#"{"dim": 2, "weights": [0.5, 0.5]}"#,
    );
    for args in [
        vec!["monotone", "--measure", "variance", "--state", s(&mixed)],
        vec!["monotone", "--measure", "variance", "--state", s(&junk)],
        vec![
            "monotone",
            "--measure",
            "variance",
            "--state",
            "/nonexistent/x.json",
        ],
        vec!["monotone", "--measure", "vidal", "--state", s(&plus)],
        vec![
            "monotone",
            "--measure",
            "vidal",
            "--k",
            "3",
            "--state",
            s(&plus),
        ],
        vec!["monotone", "--measure", "nonsense", "--state", s(&plus)],
    ] {
        let out = cli(&args);
        assert_eq!(out.code, EXIT_INPUT, "{args:?}");
        assert!(out.stdout.is_empty());
        assert_eq!(out.stderr.lines().count(), 1, "{}", out.stderr);
    }
}

#[test]
fn dim_flag_pads() {
    let (_dir, plus, _, _) = fixtures();
    let out = cli(&[
        "monotone",
        "--measure",
        "vidal",
        "--k",
        "3",
        "--dim",
        "3",
        "--state",
        s(&plus),
    ]);
    assert_eq!(out.stdout, "0.000000000000\n");
}

fn appendix_rho(dir: &Path) -> PathBuf {
    let out = cli(&[
        "appendix",
        "--p",
        "0.25",
        "--alpha",
        &std::f64::consts::FRAC_PI_2.to_string(),
    ]);
    assert_eq!(out.code, EXIT_OK);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!((v["mu1"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((v["mu2"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    assert!((v["concurrence"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    write(dir, "rho.json", &v["rho"].to_string())
}

#[test]
fn roof_on_appendix_state() {
    let dir = TempDir::new().unwrap();
    let rho = appendix_rho(dir.path());
    let args = [
        "roof",
        "--measure",
        "concurrence",
        "--k",
        "2",
        "--rho",
        s(&rho),
        "--restarts",
        "8",
        "--seed",
        "3",
    ];
    let a = cli(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    let v: Value = serde_json::from_str(&a.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() <= 1e-3);
    assert_eq!(v["converged"], Value::Bool(true));
    let total: f64 = v["ensemble"]
        .as_array()
        .unwrap()
        .iter()
        .map(|m| m["p"].as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-9);
    assert_eq!(a.stdout, cli(&args).stdout);
}

#[test]
fn roof_rank_one_is_exact() {
    let (_dir, plus, _, _) = fixtures();
    let out = cli(&["roof", "--measure", "variance", "--rho", s(&plus)]);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() <= 1e-14);
}

#[test]
fn roof_rejects_bad_density() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{"dim": 2, "matrix": [[[1.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]]}"#,
    );
    assert_eq!(
        cli(&["roof", "--measure", "variance", "--rho", s(&bad)]).code,
        EXIT_INPUT
    );
}

#[test]
fn verify_examples() {
    for args in [
        vec!["--measure", "entropy", "--dim", "4"],
        vec!["--measure", "concurrence", "--k", "2", "--dim", "3"],
        vec!["--measure", "variance", "--dim", "5"],
    ] {
        let mut full = vec!["verify", "--trials", "1000", "--seed", "7"];
        full.extend(args.iter());
        let out = cli(&full);
        assert_eq!(out.code, EXIT_OK, "{args:?}: {}", out.stdout);
        let v: Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["violations"], 0);
        assert_eq!(v["trials"], 1000);
        assert!(v["worst_margin"].as_f64().unwrap() >= -1e-9);
    }
}

#[test]
fn verify_csv_and_determinism() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("out.csv");
    let args = [
        "verify",
        "--measure",
        "vidal",
        "--k",
        "2",
        "--dim",
        "3",
        "--trials",
        "50",
        "--seed",
        "1",
        "--shifts",
        "0,2",
        "--csv",
        s(&csv),
    ];
    let a = cli(&args);
    assert_eq!(a.code, EXIT_OK);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("trial,margin,p_count"));
    assert_eq!(lines.count(), 50);
    let b = cli(&args);
    let strip = |s: &str| {
        let mut v: Value = serde_json::from_str(s).unwrap();
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(strip(&a.stdout), strip(&b.stdout));
    assert_eq!(text, std::fs::read_to_string(&csv).unwrap());
}

#[test]
fn channel_sample() {
    let args = ["channel", "sample", "--seed", "1"];
    let a = cli(&args);
    assert_eq!(a.code, EXIT_OK);
    let ch = parse_channel(&a.stdout).unwrap();
    assert!(validate_channel(&ch).unwrap().trace_preserving);
    assert_eq!(a.stdout, cli(&args).stdout);

    let out = cli(&[
        "channel",
        "sample",
        "--dim",
        "5",
        "--shifts",
        "-2,1",
        "--kraus-per-shift",
        "2",
        "--seed",
        "4",
        "--check",
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v: Value = serde_json::from_str(&out.stderr).unwrap();
    assert_eq!(v["trace_preserving"], Value::Bool(true));
    let sums = v["completeness"].as_array().unwrap();
    assert_eq!(sums.len(), 5);
    for x in sums {
        assert!((x.as_f64().unwrap() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn channel_sample_errors() {
    assert_eq!(cli(&["channel", "sample", "--shifts", ""]).code, EXIT_INPUT);
    assert_eq!(
        cli(&["channel", "sample", "--shifts", "5", "--dim", "3"]).code,
        EXIT_INPUT
    );
    assert_eq!(cli(&["channel", "sample", "--dim", "1"]).code, EXIT_INPUT);
}

#[test]
fn twirl_examples() {
    let (dir, plus, _, _) = fixtures();
    let once = cli(&["twirl", "--in", s(&plus)]);
    assert_eq!(once.code, EXIT_OK);
    let rho = parse_state(&once.stdout).unwrap().to_density().unwrap();
    let m = rho.matrix();
    assert!((m[(0, 0)].re - 0.5).abs() <= 1e-15 && (m[(1, 1)].re - 0.5).abs() <= 1e-15);
    assert_eq!(m[(0, 1)].norm(), 0.0);

    let path = write(dir.path(), "once.json", &once.stdout);
    let twice = cli(&["twirl", "--in", s(&path)]);
    assert_eq!(once.stdout, twice.stdout);
    // round trip: the emitted file re-parses to the same value
    assert_eq!(
        parse_state(&twice.stdout).unwrap().to_density().unwrap(),
        rho
    );

    let diag = write(
        dir.path(),
        "diag.json",
        r#"{"dim": 2, "matrix": [[[0.3, 0], [0, 0]], [[0, 0], [0.7, 0]]]}"#,
    );
    let out = cli(&["twirl", "--in", s(&diag)]);
    let again = parse_state(&out.stdout).unwrap().to_density().unwrap();
    assert_eq!(again.matrix()[(0, 0)].re, 0.3);
    assert_eq!(again.matrix()[(1, 1)].re, 0.7);
}

#[test]
fn appendix_rejects_bad_probability() {
    assert_eq!(
        cli(&["appendix", "--p", "1.5", "--alpha", "0"]).code,
        EXIT_INPUT
    );
    assert_eq!(
        cli(&["appendix", "--p", "0.2", "--alpha", "-0.3"]).code,
        EXIT_OK
    );
}

#[test]
fn help_exits_zero() {
    let out = cli(&["--help"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("roof"));
}
