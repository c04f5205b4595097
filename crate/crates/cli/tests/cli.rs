use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn treebal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treebal"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn balance2_on_double_edge() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "g.txt", "2 2 2\n0 1\n0 1\n");
    let o = treebal(dir.path(), &["balance2", "g.txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("max imbalance 0"));
}

#[test]
fn oracle_on_k4() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "k4.txt", "4 6 2\n0 1\n1 2\n2 3\n0 2\n0 3\n1 3\n");
    let o = treebal(dir.path(), &["oracle", "-k", "2", "k4.txt", "--out", "w.txt"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("optimal imbalance 1"));
    let v = treebal(dir.path(), &["verify", "k4.txt", "w.txt"]);
    assert_eq!(v.status.code(), Some(0));
}

#[test]
fn gen_round_trips_byte_for_byte() {
    let dir = TempDir::new().unwrap();
    for model in ["uniform-random-trees", "star-heavy", "path-heavy", "parallel-rich"] {
        let args = ["gen", "-n", "25", "-k", "2", "--model", model, "--seed", "9"];
        let first = stdout(&treebal(dir.path(), &args));
        assert_eq!(first, stdout(&treebal(dir.path(), &args)));
        write(dir.path(), "g.txt", &first);
        let parsed = treebal::io::read_graph_file(&dir.path().join("g.txt")).unwrap();
        assert_eq!(treebal::io::write_graph(&parsed.graph, parsed.k), first);
        let o = treebal(dir.path(), &["balance2", "g.txt", "--out", "f.txt"]);
        assert_eq!(o.status.code(), Some(0), "{model}");
        assert_eq!(treebal(dir.path(), &["verify", "g.txt", "f.txt"]).status.code(), Some(0));
    }
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let p = dir.path();
    assert_eq!(treebal(p, &["no-such-command"]).status.code(), Some(1));
    assert_eq!(treebal(p, &["balance2", "missing.txt"]).status.code(), Some(1));
    assert_eq!(treebal(p, &["--help"]).status.code(), Some(0));

    write(p, "path.txt", "3 2 2\n0 1\n1 2\n");
    assert_eq!(treebal(p, &["balance2", "path.txt"]).status.code(), Some(2));
    write(p, "bad.txt", "3 2 2\n0 1\n");
    assert_eq!(treebal(p, &["balance2", "bad.txt"]).status.code(), Some(2));
    write(p, "loop.txt", "2 2 2\n0 0\n0 1\n");
    assert_eq!(treebal(p, &["pack", "loop.txt"]).status.code(), Some(2));

    // star at 0 first, far outside its window, and no rounds allowed
    let n = 20;
    let mut g = format!("{n} {} 3\n", 3 * (n - 1));
    let mut f = String::new();
    for v in 1..n {
        writeln!(g, "0 {v}").unwrap();
    }
    for _ in 0..2 {
        for v in 1..n {
            writeln!(g, "{} {v}", v - 1).unwrap();
        }
    }
    for e in 0..3 * (n - 1) {
        writeln!(f, "{e} {}", e / (n - 1)).unwrap();
    }
    write(p, "skew.txt", &g);
    write(p, "skew-f.txt", &f);
    let args = ["balancek", "skew.txt", "--start", "skew-f.txt", "--persist-dir", "events"];
    let o = treebal(p, &[&args[..], &["--max-iters", "0"]].concat());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(std::fs::read_dir(p.join("events")).unwrap().count(), 1);
    assert_eq!(treebal(p, &args).status.code(), Some(0));
}

#[test]
fn default_experiment_rows_are_certified() {
    let dir = TempDir::new().unwrap();
    let o = treebal(dir.path(), &["experiment", "--suite", "default", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# treebal experiment csv v"));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name| header.iter().position(|h| *h == name).unwrap();
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4 * 3 * 4 * 2);
    for r in &rows {
        assert_eq!(r[col("status")], "ok");
        let bound: f64 = r[col("bound")].parse().unwrap();
        let achieved: f64 = match r[col("bound_kind")] {
            "imbalance" => r[col("imbalance")].parse().unwrap(),
            _ => r[col("deviation")].parse().unwrap(),
        };
        assert!(achieved <= bound, "{r:?}");
    }
}

#[test]
fn suite_files() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "s.toml", "models = [\"star-heavy\"]\nn = [15]\nk = [2, 4]\nseeds = 3\n");
    let o = treebal(dir.path(), &["experiment", "--suite", "s.toml", "--seed", "5", "--format", "text"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 6);
    assert!(stdout(&o).contains("seed=7"));

    write(dir.path(), "bad.toml", "models = [\"nope\"]\nn = [15]\nk = [2]\n");
    assert_eq!(treebal(dir.path(), &["experiment", "--suite", "bad.toml"]).status.code(), Some(1));
}
