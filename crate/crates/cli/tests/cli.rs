use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn entsort(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entsort"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, contents: &[u8]) -> String {
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn entropy_toronto() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.txt", b"TORONTO\n");
    let out = entsort(&["entropy", "--mode", "chars", "-l", "2", &f]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["m"], 7);
    assert_eq!(v["n"], 4);
    let h: Vec<f64> = v["entropy"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((h[0] - 1.8424).abs() < 1e-3);
    assert!((h[1] - 2.0 / 7.0).abs() < 1e-9);
    assert_eq!(h[2], 0.0);

    let out = entsort(&[
        "entropy", "--mode", "chars", "-l", "1", "--format", "csv", &f,
    ]);
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("m,n,H0,H1"));
    assert!(lines.next().unwrap().starts_with("7,4,1.842"));
}

#[test]
fn sort_checks_bounds_and_emits_permutation() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.txt", b"TORONTO\n");
    let report = dir.path().join("report.json");
    let out = entsort(&[
        "sort",
        "--mode",
        "chars",
        "--check-bounds",
        "--baseline",
        "--report",
        report.to_str().unwrap(),
        &f,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "5\n2\n4\n7\n3\n1\n6\n");
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["budget_lemma1"], 28);
    assert!(r["comparisons"]["total"].as_u64().unwrap() <= 28);
    assert!(r["comparisons"]["baseline"].as_u64().unwrap() > 0);
    assert_eq!(r["stable"], true);
    assert_eq!(r["sorted_ok"], true);

    let out = entsort(&["sort", "--mode", "chars", "--zero-based", &f]);
    assert_eq!(stdout(&out), "4\n1\n3\n6\n2\n0\n5\n");
    let out = entsort(&["sort", "--mode", "chars", "-l", "1", "--emit", "sorted", &f]);
    assert_eq!(stdout(&out), "NOOORTT\n");
}

#[test]
fn sort_order_zero_within_budget_on_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let data: Vec<u8> = (0..5000u32).map(|i| (i * i % 251) as u8).collect();
    let f = write(dir.path(), "d.bin", &data);
    let out = entsort(&["sort", "--check-bounds", "--emit", "none", &f]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(r["comparisons"]["total"].as_u64() <= r["budget_lemma1"].as_u64());
    assert_eq!(r["m"], 5000);
}

#[test]
fn sort_modes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "w.txt", b"pear apple fig apple\n");
    let out = entsort(&[
        "sort", "--mode", "tokens", "-l", "1", "--emit", "sorted", &f,
    ]);
    assert_eq!(stdout(&out), "apple\napple\nfig\npear\n");
    let f = write(dir.path(), "i.txt", b"10 -3 7\n-3\n");
    let out = entsort(&["sort", "--mode", "ints", "--emit", "sorted", &f]);
    assert_eq!(stdout(&out), "-3\n-3\n7\n10\n");
    let out = entsort(&[
        "sort", "--mode", "ints", "--format", "csv", "--emit", "none", &f,
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("schema_version,source,sorter,m,n,order,entropy"));
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn gen_periodic() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("abc.txt");
    let out = entsort(&[
        "gen",
        "--kind",
        "periodic",
        "--pattern",
        "abc",
        "--length",
        "9",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(std::fs::read(&p).unwrap(), b"abcabcabc");
}

#[test]
fn gen_is_reproducible() {
    let a = entsort(&[
        "gen", "--kind", "markov", "-n", "8", "-m", "200", "--seed", "3", "--mode", "ints",
    ]);
    let b = entsort(&[
        "gen", "--kind", "markov", "-n", "8", "-m", "200", "--seed", "3", "--mode", "ints",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 200);
    let z = entsort(&[
        "gen", "--kind", "zipf", "-n", "4", "-m", "50", "--mode", "tokens",
    ]);
    assert!(stdout(&z)
        .split_whitespace()
        .all(|t| t.parse::<u32>().unwrap() < 4));
}

#[test]
fn bench_small_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let specs = write(
        dir.path(),
        "specs.jsonl",
        br#"{"kind":"periodic","pattern":"abc","length":300}
{"kind":"uniform","alphabet":16,"length":500,"seed":1}
{"kind":"markov","alphabet":4,"length":500,"order":1,"seed":2}
"#,
    );
    let out = entsort(&[
        "bench",
        "--specs",
        &specs,
        "-l",
        "2",
        "--baseline",
        "--check-bounds",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let records: Vec<Value> = stdout(&out)
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(records.len(), 3);
    for rec in &records {
        let reports = rec["reports"].as_array().unwrap();
        // baseline, sort0, and sort_ell at orders 0..=2
        assert_eq!(reports.len(), 5);
        for r in reports {
            assert_eq!(r["violations"].as_array().unwrap().len(), 0);
            assert!(r["comparisons"]["baseline"].is_u64());
        }
    }
    let out = entsort(&["bench", "--specs", &specs, "-l", "0", "--format", "csv"]);
    assert_eq!(stdout(&out).lines().count(), 1 + 3 * 2);
}

#[test]
fn errors_exit_two() {
    assert_eq!(entsort(&["sort", "--order", "x"]).status.code(), Some(2));
    assert_eq!(entsort(&["sort", "--mode", "words"]).status.code(), Some(2));
    assert_eq!(entsort(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        entsort(&["sort", "/nonexistent/input"]).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.txt", b"1 2 three");
    assert_eq!(
        entsort(&["sort", "--mode", "ints", &f]).status.code(),
        Some(2)
    );
    assert_eq!(
        entsort(&["gen", "--kind", "uniform", "-n", "0"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn stdin_input() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_entsort"))
        .args(["entropy", "--mode", "chars"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    use std::io::Write;
    child.stdin.take().unwrap().write_all(b"aabb").unwrap();
    let out = child.wait_with_output().unwrap();
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["entropy"][0], 1.0);
}
