//! End-to-end checks of the binary: format round trips, exit codes, and
//! byte-identical reports across reruns and thread counts.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mincut")
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let mut path = std::env::temp_dir();
    path.push(format!("mincut-cli-test-{}-{name}", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().unwrap()
}

const C6: &str = "c unit six-cycle\np 6 6\ne 1 2 1\ne 2 3 1\ne 3 4 1\ne 4 5 1\ne 5 6 1\ne 6 1 1\n";

#[test]
fn mincut_on_c6_reports_value_two() {
    let path = write_temp("c6.graph", C6);
    let out = run(&["mincut", path.to_str().unwrap(), "--verify"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("value: 2.0"), "{text}");
    // The reported side is 1-indexed, sorted, and between 1 and 3 vertices.
    let side: Vec<usize> = text
        .lines()
        .skip_while(|l| *l != "side:")
        .skip(1)
        .take_while(|l| l.starts_with("  "))
        .map(|l| l.trim().parse().unwrap())
        .collect();
    assert!(!side.is_empty() && side.len() <= 3);
    assert!(side.windows(2).all(|w| w[0] < w[1]));
    assert!(text.contains("reference value 2: match"));
}

#[test]
fn malformed_weight_names_the_line() {
    let path = write_temp("bad.graph", "p 3 2\ne 1 2 1.0\ne 2 3 oops\n");
    let out = run(&["mincut", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn exit_codes_for_bad_inputs() {
    // Missing header.
    let path = write_temp("nohdr.graph", "e 1 2 1.0\n");
    assert_eq!(
        run(&["mincut", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
    // Edge count mismatch.
    let path = write_temp("short.graph", "p 3 3\ne 1 2 1.0\n");
    assert_eq!(
        run(&["mincut", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
    // Self-loop.
    let path = write_temp("loop.graph", "p 2 1\ne 1 1 1.0\n");
    assert_eq!(
        run(&["mincut", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
    // Singleton graph.
    let path = write_temp("k1.graph", "p 1 0\n");
    assert_eq!(
        run(&["decompose", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn disconnected_input_reports_zero() {
    let path = write_temp("disc.graph", "p 4 2\ne 1 2 1.0\ne 3 4 1.0\n");
    let out = run(&["mincut", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("value: 0.0"), "{text}");
}

#[test]
fn reports_are_byte_identical_across_reruns_and_jobs() {
    let path = write_temp("det.graph", C6);
    let mut outputs = Vec::new();
    for _ in 0..3 {
        let out = run(&["mincut", path.to_str().unwrap(), "--json"]);
        assert!(out.status.success());
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[1], outputs[2]);
    let threaded = run(&["mincut", path.to_str().unwrap(), "--json", "--jobs", "4"]);
    assert!(threaded.status.success());
    assert_eq!(outputs[0], threaded.stdout);
}

#[test]
fn decompose_shows_dumbbell_cliques() {
    // Two unit K6's and a bridge.
    let mut text = String::from("p 12 31\n");
    for u in 1..=6u32 {
        for v in u + 1..=6 {
            text.push_str(&format!("e {u} {v} 1\n"));
            text.push_str(&format!("e {} {} 1\n", u + 6, v + 6));
        }
    }
    text.push_str("e 1 7 1\n");
    let path = write_temp("dumbbell.graph", &text);
    let out = run(&[
        "decompose",
        path.to_str().unwrap(),
        "--level",
        "0",
        "--s0-mult",
        "10",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(
        report.contains("[1,2,3,4,5,6]") && report.contains("[7,8,9,10,11,12]"),
        "{report}"
    );
}

#[test]
fn skeleton_round_trip_and_verify() {
    let path = write_temp("skel-in.graph", C6);
    let out_path = write_temp("skel-out.graph", "");
    let out = run(&[
        "skeleton",
        path.to_str().unwrap(),
        "--verify",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("both skeleton properties hold"), "{text}");
    // The written file parses back with the same shape.
    let skel_text = std::fs::read_to_string(&out_path).unwrap();
    assert!(skel_text.contains("skeleton W'"));
    let header = skel_text
        .lines()
        .find(|l| l.starts_with("p "))
        .expect("skeleton has a header");
    let mut it = header.split_whitespace().skip(1);
    let n: usize = it.next().unwrap().parse().unwrap();
    let m: usize = it.next().unwrap().parse().unwrap();
    assert_eq!(n, 6);
    assert_eq!(m, skel_text.lines().filter(|l| l.starts_with("e ")).count());
    // Feeding the skeleton back through the parser round-trips.
    let reparse = run(&["mincut", out_path.to_str().unwrap()]);
    assert!(reparse.status.success());
}
