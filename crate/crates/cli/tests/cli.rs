use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mproots(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mproots"))
        .args(args)
        .output()
        .expect("running mproots")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_solve_verify_curve() {
    let dir = tempfile::tempdir().unwrap();
    let poly = dir.path().join("c12.poly");
    let roots = dir.path().join("c12.roots");

    let out = mproots(&[
        "gen",
        "--family",
        "chebyshev",
        "--n",
        "12",
        "--bits",
        "256",
        "--out",
        s(&poly),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&poly)
        .unwrap()
        .starts_with("poly v1 degree=12 bits=256"));

    let out = mproots(&[
        "solve",
        "--in",
        s(&poly),
        "--high-bits",
        "512",
        "--errors",
        "--out",
        s(&roots),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let line = String::from_utf8_lossy(&out.stdout);
    assert!(
        line.contains("method=dk2+low") && line.contains("converged=true"),
        "{line}"
    );
    assert!(line.contains("max_rel_err="));
    let sidecar = fs::read_to_string(dir.path().join("c12.roots.csv")).unwrap();
    assert_eq!(sidecar.lines().next(), Some("index,re,im,rel_err"));
    assert_eq!(sidecar.lines().count(), 13);

    let out = mproots(&[
        "verify",
        "--roots",
        s(&roots),
        "--reference",
        "selfsolve",
        "--in",
        s(&poly),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    let max: f64 = text
        .lines()
        .last()
        .and_then(|l| l.strip_prefix("max="))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(max < 1e-60, "{text}");

    let out = mproots(&["curve", "--roots", s(&roots)]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 13);
}

#[test]
fn wilkinson_errors_are_reported_and_verifiable() {
    let dir = tempfile::tempdir().unwrap();
    let roots = dir.path().join("w20.roots");
    let out = mproots(&[
        "solve",
        "--family",
        "wilkinson",
        "--n",
        "20",
        "--method",
        "dka3",
        "--high-bits",
        "256",
        "--out",
        s(&roots),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("max_rel_err="));
    let out = mproots(&["verify", "--roots", s(&roots), "--reference", "analytic"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_writes_csv_and_roots() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("matrix.txt");
    let csv = dir.path().join("out.csv");
    let roots = dir.path().join("roots");
    fs::write(
        &matrix,
        "# family n method low high eps_rel eps_abs mode threads\n\
         wilkinson 10 dka2 106 256 default 1e-300 jacobi 1\n\
         chebyshev 10 dk3+low 106 256 1e-60 1e-300 gauss-seidel 1\n",
    )
    .unwrap();
    let out = mproots(&[
        "bench",
        "--matrix",
        s(&matrix),
        "--out",
        s(&csv),
        "--roots-dir",
        s(&roots),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "family,n,method,low_bits,high_bits,threads,sweeps,wall_seconds,max_rel_err,converged"
    );
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("wilkinson,10,dka2,106,256,1,") && lines[1].ends_with(",true"));
    assert!(roots.join("row001.roots").exists() && roots.join("row002.roots").exists());
}

#[test]
fn exit_codes() {
    assert_eq!(mproots(&["--help"]).status.code(), Some(0));
    assert_eq!(mproots(&["solve", "--bogus"]).status.code(), Some(1));
    assert_eq!(
        mproots(&["solve", "--family", "wilkinson", "--n", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        mproots(&[
            "solve",
            "--family",
            "chebyshev",
            "--n",
            "30",
            "--method",
            "dka2",
            "--max-iter",
            "2"
        ])
        .status
        .code(),
        Some(2)
    );

    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("bad.txt");
    fs::write(&matrix, "wilkinson 10 dka2 106\n").unwrap();
    let out = mproots(&["bench", "--matrix", s(&matrix), "--out", s(&dir.path().join("o.csv"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.txt:1:"));
}
