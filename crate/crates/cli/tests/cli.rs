use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use chowred::chow::ChowForm;
use chowred::Rationals;

fn chowred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chowred"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn system(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn decompose_point() {
    let dir = tempfile::tempdir().unwrap();
    let f = system(dir.path(), "p.txt", "n = 1\nX1 - 1\n");
    let o = chowred(&["decompose", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "C0 = U0_0 + U0_1\nC1 = 1\n");
}

#[test]
fn decompose_is_deterministic_and_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let f = system(dir.path(), "m.txt", "n = 2\n# a line and a point\nX1^2 - X1\nX1*X2\n");
    let a = stdout(&chowred(&["decompose", "--seed", "5", &f]));
    let b = stdout(&chowred(&["decompose", "--seed", "5", &f]));
    assert_eq!(a, b);
    for (k, line) in a.lines().enumerate() {
        let body = line.split_once(" = ").unwrap().1;
        let c = ChowForm::parse(&Rationals, &format!("chow{{n=2, r={k}, D=0}} {body}"), k + 1).unwrap();
        assert_eq!(c.poly().to_string(), body);
    }
    assert!(a.starts_with("C0 = U0_0 + U0_1\nC1 = "));
}

#[test]
fn trace_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = system(dir.path(), "p.txt", "n = 1\nX1^2 - 4\n");
    let out = dir.path().join("out.txt");
    let json = dir.path().join("out.json");
    let o = chowred(&[
        "decompose",
        "--trace",
        "--output",
        out.to_str().unwrap(),
        "--json",
        json.to_str().unwrap(),
        &f,
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.contains("R[i=0,k=0]"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["forms"][0]["degree"], 2);
}

#[test]
fn prime_commands() {
    let dir = tempfile::tempdir().unwrap();
    let f = system(dir.path(), "h.txt", "n = 1\n2*X1 - 1\n");
    let o = chowred(&["check-prime", "--prime", "3", &f]);
    assert_eq!(stdout(&o), "3 Good\n");
    let o = chowred(&["check-prime", "--prime", "2", &f]);
    assert_eq!(o.status.code(), Some(2));

    let g = system(dir.path(), "j.txt", "n = 2\nX1^2 - X1\n3*X2\n");
    let o = chowred(&["scan-primes", "--max-prime", "7", "--workers", "2", &g]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "3 Bad 0\n5 Good\n7 Good\n");
}

#[test]
fn bound_and_sweep() {
    let o = chowred(&["bound", "-n", "1", "-s", "1", "-d", "1", "--height", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let total: f64 = text
        .lines()
        .find(|l| l.starts_with("total"))
        .and_then(|l| l.split_whitespace().nth(1))
        .unwrap()
        .parse()
        .unwrap();
    assert!(total.is_finite() && total > 0.0);
    assert!(text.contains("separate_h"));

    let o = chowred(&["sweep", "--param", "h", "--values", "1,100"]);
    let text = stdout(&o);
    assert!(text.contains("1.8959e8"));
    assert!(text.contains("4.0589e8"));
    let o = chowred(&["sweep", "--param", "x", "--values", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = system(dir.path(), "bad.txt", "n = 1\nX1 + $\n");
    let o = chowred(&["decompose", &f]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2"), "{err}");
    let o = chowred(&["decompose", "/nonexistent/sys.txt"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn exhausted_retries_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let f = system(dir.path(), "p.txt", "n = 1\nX1 - 1\n");
    let o = chowred(&["decompose", "--retries", "0", &f]);
    assert_eq!(o.status.code(), Some(1));
}
