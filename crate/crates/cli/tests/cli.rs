use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sparse_ldlt::io::{read_blocks, read_permutation, read_vector};
use sparse_ldlt::PivotBlock;

fn sldlt(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sldlt"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const EXCHANGE: &str = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n2 1 1.0\n";

#[test]
fn exchange_matrix_factors_with_one_block() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.mtx"), EXCHANGE).unwrap();
    let out = sldlt(dir.path(), &["factor", "x.mtx", "--check"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("pivots_2x2 = 1"), "{text}");
    assert!(text.contains("pivots_1x1 = 0"));
    assert!(text.contains("residual_fro = 0e0"), "{text}");

    let blocks = read_blocks(fs::read(dir.path().join("x.B.txt")).unwrap().as_slice()).unwrap();
    assert_eq!(blocks.blocks(), &[PivotBlock::two_by_two(0.0, 1.0, 0.0)]);
    let perm = read_permutation(fs::read(dir.path().join("x.P.txt")).unwrap().as_slice()).unwrap();
    assert!(perm.is_identity());
    let l = fs::read_to_string(dir.path().join("x.L.mtx")).unwrap();
    assert_eq!(l.lines().nth(1), Some("2 2 2"));
    assert!(dir.path().join("x.stats.txt").exists());
}

#[test]
fn explicit_output_paths() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.mtx"), EXCHANGE).unwrap();
    let out = sldlt(
        dir.path(),
        &[
            "factor",
            "x.mtx",
            "--l-out",
            "l.mtx",
            "--b-out",
            "b.txt",
            "--p-out",
            "p.txt",
            "--stats-out",
            "s.txt",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    for f in ["l.mtx", "b.txt", "p.txt", "s.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    assert!(!dir.path().join("x.L.mtx").exists());
}

#[test]
fn asymmetric_general_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.mtx"),
        "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n2 1 2.0\n1 2 3.0\n",
    )
    .unwrap();
    let out = sldlt(dir.path(), &["factor", "bad.mtx"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bad.mtx"), "{}", stderr(&out));
}

#[test]
fn malformed_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("bad.mtx"),
        "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n",
    )
    .unwrap();
    let out = sldlt(dir.path(), &["factor", "bad.mtx"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn singular_matrix_exits_with_numerical_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("s.mtx"),
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 2\n1 1 1.0\n3 3 1.0\n",
    )
    .unwrap();
    let out = sldlt(dir.path(), &["factor", "s.mtx"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn identity_solve_returns_rhs() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("i.mtx"),
        "%%MatrixMarket matrix coordinate real symmetric\n3 3 3\n1 1 1\n2 2 1\n3 3 1\n",
    )
    .unwrap();
    fs::write(dir.path().join("b.txt"), "# rhs\n1.5\n-2\n0.25\n").unwrap();
    let out = sldlt(dir.path(), &["solve", "i.mtx", "b.txt"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let x = read_vector(out.stdout.as_slice()).unwrap();
    assert_eq!(x, vec![1.5, -2.0, 0.25]);
}

#[test]
fn known_solution_is_recovered() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(sldlt(
        d,
        &[
            "generate",
            "--n",
            "60",
            "--density",
            "0.2",
            "--seed",
            "5",
            "-o",
            "a.mtx"
        ]
    )
    .status
    .success());
    let a = sparse_ldlt::io::read_matrix_market_file(d.join("a.mtx")).unwrap();
    let x_known: Vec<f64> = (0..60).map(|i| ((i * 7) % 11) as f64 - 5.0).collect();
    let b = a.mul_vec(&x_known).unwrap();
    let mut rhs = Vec::new();
    sparse_ldlt::io::write_vector(&mut rhs, &b).unwrap();
    fs::write(d.join("b.txt"), rhs).unwrap();

    let out = sldlt(d, &["solve", "a.mtx", "b.txt", "-o", "x.txt", "--verify"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let line = stderr(&out);
    let rel: f64 = line
        .trim()
        .strip_prefix("relative_residual = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!(rel <= 1e-9, "{rel}");
    let x = read_vector(fs::read(d.join("x.txt")).unwrap().as_slice()).unwrap();
    assert_eq!(x.len(), 60);
}

#[test]
fn missing_rhs_fails() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.mtx"), EXCHANGE).unwrap();
    let out = sldlt(dir.path(), &["solve", "x.mtx", "nope.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error: "));
}

#[test]
fn rhs_length_mismatch_fails() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("x.mtx"), EXCHANGE).unwrap();
    fs::write(dir.path().join("b.txt"), "1\n2\n3\n").unwrap();
    let out = sldlt(dir.path(), &["solve", "x.mtx", "b.txt"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_writes_rows_and_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let out = sldlt(
        dir.path(),
        &[
            "bench",
            "--n",
            "30",
            "--density",
            "0.3",
            "--instances",
            "2",
            "--seed",
            "1",
            "--csv",
            "r.csv",
        ],
    );
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("# alpha = 0.01"));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].ends_with("max_abs_l"));
    assert!(lines[1].starts_with("instance,30,0.3,0,"));
    assert!(lines[3].starts_with("aggregate,30,0.3,2,"));

    let timed = sldlt(
        dir.path(),
        &[
            "bench",
            "--n",
            "30",
            "--density",
            "0.3",
            "--instances",
            "1",
            "--csv",
            "t.csv",
            "--timing",
        ],
    );
    assert!(timed.status.success());
    let header = fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(header.lines().next().unwrap().ends_with("wall_time_s"));
}

#[test]
fn usage_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sldlt(dir.path(), &["factor"]).status.code(), Some(1));
    assert_eq!(sldlt(dir.path(), &["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        sldlt(
            dir.path(),
            &["generate", "--n", "10", "--density", "1.5", "-o", "a.mtx"]
        )
        .status
        .code(),
        Some(1)
    );
    fs::write(dir.path().join("x.mtx"), EXCHANGE).unwrap();
    assert_eq!(
        sldlt(dir.path(), &["factor", "x.mtx", "--alpha", "0.9"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(sldlt(dir.path(), &["--help"]).status.code(), Some(0));
}
