use std::path::PathBuf;
use std::process::{Command, Output};

use floquet_sweep::HEADER;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_floquet-thermo"))
}

fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("floquet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn sweep_writes_header_and_rows() {
    let out = run(bin()
        .arg("sweep")
        .arg(config_path("ohmic_a8.json"))
        .args(["--set", "q_end=0.05"]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], HEADER.join(","));
    assert_eq!(lines.len(), 7);
    assert!(lines[1].starts_with("0,1.41421356237,true,"));
}

#[test]
fn single_point_range() {
    let out = run(bin()
        .arg("sweep")
        .arg(config_path("gaussian_a8.json"))
        .args(["--set", "q_start=2", "--set", "q_end=2"]));
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn output_is_independent_of_thread_count() {
    let sweep = |threads: &str| {
        let out = run(bin()
            .env("FLOQUET_THREADS", threads)
            .arg("sweep")
            .arg(config_path("subohmic_a82.json"))
            .args(["--set", "q_start=9", "--set", "q_end=9.6"]));
        assert_eq!(out.status.code(), Some(0));
        out.stdout
    };
    assert_eq!(sweep("1"), sweep("4"));
}

#[test]
fn sweep_to_file() {
    let target = std::env::temp_dir().join(format!("floquet-out-{}.csv", std::process::id()));
    let out = run(bin()
        .arg("sweep")
        .arg(config_path("ohmic_a8.json"))
        .args(["--set", "q_end=0.02", "--out"])
        .arg(&target));
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(&target).unwrap();
    assert_eq!(written.lines().count(), 4);
    std::fs::remove_file(target).ok();
}

#[test]
fn config_errors_exit_one() {
    let missing = run(bin().args(["sweep", "/nonexistent/config.json"]));
    assert_eq!(missing.status.code(), Some(1));

    let bad = write_config("bad.json", r#"{"a": 8, "q_start": 1, "q_end": 0, "q_step": 0.1}"#);
    assert_eq!(run(bin().arg("sweep").arg(&bad)).status.code(), Some(1));

    let unknown = write_config("unknown.json", r#"{"a": 8, "q_start": 0, "q_end": 1, "q_step": 0.1, "colour": 1}"#);
    assert_eq!(run(bin().arg("sweep").arg(&unknown)).status.code(), Some(1));

    let bad_set = run(bin()
        .arg("sweep")
        .arg(config_path("ohmic_a8.json"))
        .args(["--set", "q_step"]));
    assert_eq!(bad_set.status.code(), Some(1));

    assert_eq!(run(bin().arg("frobnicate")).status.code(), Some(1));
}

#[test]
fn crossings_reports_direction() {
    let out = run(bin()
        .arg("crossings")
        .arg(config_path("gaussian_a8.json"))
        .args(["--target", "tau1"]));
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let row = text.lines().nth(1).expect("one crossing");
    let (q, direction) = row.split_once(',').unwrap();
    assert!((q.parse::<f64>().unwrap() - 3.89).abs() < 0.01, "{row}");
    assert_eq!(direction, "falling");
}

#[test]
fn crossings_without_crossing_exit_one() {
    let out = run(bin()
        .arg("crossings")
        .arg(config_path("ohmic_a8.json"))
        .args(["--target", "r1", "--set", "q_end=6"]));
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn mode_dump_json_shape() {
    let out = run(bin()
        .arg("mode-dump")
        .arg(config_path("ohmic_a8.json"))
        .args(["--q", "1.0"]));
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let nu = v["nu_over_omega"].as_f64().unwrap();
    assert!((nu - 1.407741046083).abs() < 1e-9);
    let coefficients = v["coefficients"].as_array().unwrap();
    assert!(coefficients.len() % 2 == 1 && coefficients.len() > 3);
    for c in coefficients {
        assert_eq!(c.as_array().unwrap().len(), 3);
    }
    assert!(v["tail_mass"].as_f64().unwrap() < 1e-12);

    let unstable = run(bin()
        .arg("mode-dump")
        .arg(config_path("ohmic_a8.json"))
        .args(["--q", "7.0"]));
    assert_eq!(unstable.status.code(), Some(1));
}

#[test]
fn validate_passes() {
    let out = run(bin().arg("validate"));
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().all(|l| !l.starts_with("FAIL")));
}
