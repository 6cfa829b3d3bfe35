use std::fs;
use std::process::{Command, Output};

fn cacm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cacm")).args(args).env("CACM_WORKERS", "2").output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const SMALL: &str = "n = 3\nm = 8\nkappa = 2\ndelta = 0.25\nfile_units = 8\npackets = 4\nsweep = 0:2:8\ntrials = 1\n";

#[test]
fn demo_prints_both_rates() {
    let out = cacm(&["demo"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("comp-cacm rate 0.75\n"), "{text}");
    assert!(text.contains("rap-cm rate 1.25\n"), "{text}");
    assert!(text.contains("1: 1:1 2:1 3:1 4:1\n2: 1:1 2:2 3:1 4:2\n"), "{text}");
    assert!(text.contains("  2:1 ^ 2:2\n"), "{text}");
}

#[test]
fn simulate_twice_gives_identical_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        let res = cacm(&["simulate", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "9"]);
        assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.starts_with("M,series,mean_rate,stderr,trials\n"));
    assert_eq!(text.lines().count(), 1 + 5 * 6);
}

#[test]
fn flags_override_the_config() {
    let out = cacm(&["simulate", "--trials", "2", "--sweep", "60", "--seed", "3"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("60.000000,comp-cacm,0.000000,0.000000,2\n"), "{text}");
}

#[test]
fn bounds_vanish_once_the_library_fits() {
    let out = cacm(&["bounds", "--sweep", "0:20:100"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for m in ["60", "80", "100"] {
        assert!(text.contains(&format!("{m}.000000,lower-bound,0.000000,0.000000,0\n")), "{text}");
    }
    assert!(text.contains("0.000000,upper-bound,9.561792,"), "{text}");
}

#[test]
fn plot_renders_a_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("b.csv");
    let svg = dir.path().join("b.svg");
    assert!(cacm(&["bounds", "--sweep", "0:10:100", "--out", csv.to_str().unwrap()]).status.success());
    assert!(cacm(&["plot", "--input", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]).status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));
    assert_eq!(text.matches("<polyline").count(), 2);
}

#[test]
fn gen_writes_a_parsable_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.cfg");
    fs::write(&cfg, SMALL).unwrap();
    let out = cacm(&["gen", "--config", cfg.to_str().unwrap(), "--trials", "7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("trials = 7\n"));
    assert!(text.contains("# 1 I - 8\n# 2 P 1 2\n"), "{text}");
    let back = dir.path().join("back.cfg");
    fs::write(&back, &text).unwrap();
    assert!(cacm(&["gen", "--config", back.to_str().unwrap()]).status.success());
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(cacm(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cacm(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(cacm(&[]).status.code(), Some(2));
}

#[test]
fn bad_input_gives_a_one_line_diagnostic() {
    let out = cacm(&["bounds", "--sweep", "0:10:500"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("sweep"), "{err}");

    let out = cacm(&["plot", "--input", "/nonexistent/x.csv", "--out", "/tmp/x.svg"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("/nonexistent/x.csv"));
}
