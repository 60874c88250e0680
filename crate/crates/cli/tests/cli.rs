use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_homothet"))
        .args(args)
        .env("HOMOTHET_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn grid(dir: &TempDir, side: usize) -> PathBuf {
    let path = dir.path().join(format!("grid{side}.txt"));
    let out = run(&["gen", "grid", "--side", &side.to_string(), "--output", s(&path)]);
    assert!(out.status.success());
    path
}

#[test]
fn square_count_on_a_grid() {
    let dir = TempDir::new().unwrap();
    let g = grid(&dir, 30);
    let out = run(&["squares", "--input", s(&g), "--format", "count"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "8555");
}

#[test]
fn jsonl_has_one_record_per_square_and_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let g = grid(&dir, 8);
    let first = stdout(&run(&["squares", "--input", s(&g)]));
    let second = stdout(&run(&["squares", "--input", s(&g)]));
    assert_eq!(first, second);
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(lines.len(), 140);
    let rec: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
    assert_eq!(rec["vertices"].as_array().unwrap().len(), 4);
    assert!(rec["scale"].is_string());

    let path = dir.path().join("out.csv");
    let out = run(&["squares", "--input", s(&g), "--format", "csv", "--output", s(&path)]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 140);
}

#[test]
fn triangle_copies_with_mode_header() {
    let dir = TempDir::new().unwrap();
    let g = grid(&dir, 4);
    let tri = write(&dir, "tri.txt", "0 0\n1 0\n0 1\n");
    let out = run(&["copies", "--input", s(&g), "--pattern", s(&tri), "--format", "count"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "14");
    assert!(String::from_utf8_lossy(&out.stderr).contains("# mode: safe"));

    let jsonl = stdout(&run(&["copies", "--input", s(&g), "--pattern", s(&tri)]));
    assert!(jsonl.starts_with("# mode: safe\n"));
    assert_eq!(jsonl.lines().filter(|l| !l.starts_with('#')).count(), 14);

    let both = run(&["copies", "--input", s(&g), "--pattern", s(&tri), "--format", "count", "--negative-scale"]);
    assert_eq!(stdout(&both).trim(), "28");
}

#[test]
fn verify_agrees_with_the_oracles() {
    let dir = TempDir::new().unwrap();
    let pts = dir.path().join("r.txt");
    assert!(run(&["gen", "random", "--n", "300", "--range", "20", "--seed", "3", "--output", s(&pts)])
        .status
        .success());
    let out = run(&["verify", "squares", "--input", s(&pts)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("OK: "));

    let trap = write(&dir, "trap.txt", "0 0\n3 0\n1 1\n2 1\n");
    let out = run(&["verify", "copies", "--input", s(&pts), "--pattern", s(&trap)]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let cube = dir.path().join("c.txt");
    assert!(run(&["gen", "grid", "--side", "4", "--dim", "3", "--output", s(&cube)]).status.success());
    let out = run(&["verify", "hypercubes", "--input", s(&cube), "--threshold-override", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "OK: 36 hypercubes");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = grid(&dir, 4);
    let garbage = write(&dir, "bad.txt", "0 0\n1 x\n");
    assert_eq!(run(&["squares", "--input", s(&garbage)]).status.code(), Some(2));
    let ragged = write(&dir, "ragged.txt", "0 0\n1 2 3\n");
    assert_eq!(run(&["squares", "--input", s(&ragged)]).status.code(), Some(2));
    assert_eq!(run(&["squares"]).status.code(), Some(2));

    let collinear = write(&dir, "col.txt", "0 0\n1 1\n2 2\n");
    assert_eq!(run(&["copies", "--input", s(&g), "--pattern", s(&collinear)]).status.code(), Some(3));

    let space = write(&dir, "space.txt", "0 0 0\n1 1 1\n");
    assert_eq!(run(&["squares", "--input", s(&space)]).status.code(), Some(4));
    let tri = write(&dir, "tri.txt", "0 0\n1 0\n0 1\n");
    assert_eq!(run(&["copies", "--input", s(&space), "--pattern", s(&tri)]).status.code(), Some(4));

    let missing = dir.path().join("missing.txt");
    assert_eq!(run(&["squares", "--input", s(&missing)]).status.code(), Some(5));
}

#[test]
fn bench_writes_csv_with_slope() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bench.csv");
    let out = run(&["bench", "squares", "--sizes", "5,10", "--repetitions", "1", "--output", s(&path)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("engine,instance,n,seconds,count"));
    assert!(text.contains("amplified,grid-10^2,100,"));
    assert!(text.lines().last().unwrap().starts_with("slope="));
}
