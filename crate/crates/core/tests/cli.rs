use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn simulate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simulate"))
        .args(args)
        .output()
        .expect("spawn simulate")
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("greenhouse-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

#[test]
fn passing_scenario_exits_zero() {
    let out = simulate(&[
        "--scenario",
        &corpus("rain_alert.scn"),
        "--duration-ms",
        "15000",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn failed_expectation_exits_two() {
    let p = scratch("fail.scn", "at 0 expect red.buzzer == 1 within 500\n");
    let out = simulate(&["--scenario", p.to_str().unwrap(), "--duration-ms", "2000"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn parse_error_exits_three_with_line_number() {
    let p = scratch("bad.scn", "# fine\nat 10 set nonsense 4\n");
    let out = simulate(&["--scenario", p.to_str().unwrap(), "--duration-ms", "100"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn missing_scenario_exits_four() {
    let out = simulate(&[
        "--scenario",
        "/nonexistent/none.scn",
        "--duration-ms",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bad_arguments_exit_one() {
    let p = scratch("empty.scn", "");
    let out = simulate(&["--scenario", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = simulate(&[
        "--scenario",
        p.to_str().unwrap(),
        "--duration-ms",
        "100",
        "--drop-prob",
        "1.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn report_json_has_counters() {
    let p = scratch("empty2.scn", "");
    let out = simulate(&[
        "--scenario",
        p.to_str().unwrap(),
        "--duration-ms",
        "2000",
        "--report-json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in [
        "frames_tx",
        "frames_rx",
        "link_sent_bytes",
        "link_delivered_bytes",
        "link_dropped_bytes",
        "decode_rejected_bytes",
    ] {
        assert!(
            v.get(key).is_some_and(|x| x.is_u64()),
            "missing {key} in {v}"
        );
    }
    assert_eq!(v["frames_tx"], 11);
}

#[test]
fn trace_to_stdout_and_file_match() {
    let scn = corpus("noisy_link.scn");
    let args = [
        "--scenario",
        scn.as_str(),
        "--duration-ms",
        "5000",
        "--seed",
        "9",
        "--snapshot-every",
        "1000",
    ];
    let mut with_stdout = args.to_vec();
    with_stdout.extend(["--trace", "-"]);
    let out = simulate(&with_stdout);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("t=0 GREEN PINMAP"));

    let trace_path = scratch("trace.txt", "");
    let mut with_file = args.to_vec();
    with_file.extend(["--trace", trace_path.to_str().unwrap()]);
    simulate(&with_file);
    let file = std::fs::read_to_string(&trace_path).unwrap();
    assert!(
        stdout.starts_with(&file),
        "stdout trace should be the file trace followed by the summary"
    );
    assert!(file.contains("RED DISPLAY l1="));
}
