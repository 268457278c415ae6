//! End-to-end tests of the CLI surface: flags, output shapes, CSV schema,
//! exit codes.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fastmm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fastmm"))
        .args(args)
        .env_remove("FASTMM_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmpdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("fastmm_cli_{name}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn multiply_strassen_counts_seven_to_the_sixth() {
    let dir = tmpdir("mul");
    let csv = dir.join("bench.csv");
    let out = fastmm(&[
        "multiply",
        "--alg",
        "strassen",
        "--n",
        "64",
        "--cutoff",
        "1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("mults=117649"), "{}", stdout(&out));

    // CSV: header plus one appended row per run
    let out = fastmm(&[
        "multiply",
        "--alg",
        "naive",
        "--n",
        "8",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("mults=512 adds=448"));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alg,n,cutoff,mults,adds,wall_ns,ratio");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("strassen,64,1,117649,"));
    assert!(lines[2].starts_with("naive,8,1,512,448,"));
}

#[test]
fn multiply_with_cutoff_disabling_recursion_matches_naive() {
    let out = fastmm(&["multiply", "--alg", "strassen", "--n", "8", "--cutoff", "8"]);
    assert!(out.status.success());
    assert!(
        stdout(&out).contains("mults=512 adds=448"),
        "{}",
        stdout(&out)
    );
}

#[test]
fn multiply_is_deterministic_under_seed() {
    let a = fastmm(&["multiply", "--alg", "winograd", "--n", "4", "--seed", "9"]);
    let b = fastmm(&["multiply", "--alg", "winograd", "--n", "4", "--seed", "9"]);
    let strip = |s: &str| -> String { s.split("wall_ns").next().unwrap_or_default().to_string() };
    assert_eq!(strip(&stdout(&a)), strip(&stdout(&b)));
}

#[test]
fn verify_builtins_pass() {
    for name in ["strassen", "winograd", "complex_mult"] {
        let out = fastmm(&["verify", "--builtin", name]);
        assert!(out.status.success(), "{name}");
        assert!(stdout(&out).contains("PASS"));
    }
}

#[test]
fn verify_detects_flipped_sign_with_certificate() {
    let dir = tmpdir("verify");
    let good = dir.join("strassen.alg");
    let out = fastmm(&[
        "aggregate",
        "--mode",
        "two",
        "--m",
        "1",
        "--k",
        "1",
        "--n",
        "1",
        "--out",
        good.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    // write a bilinear file and corrupt one coefficient sign
    let text = "bilinear broken\n\
                target mm 2 2 2\n\
                rank 7\n"
        .to_string()
        + &strassen_body(true)
        + "end\n";
    let bad = dir.join("broken.alg");
    fs::write(&bad, text).unwrap();
    let out = fastmm(&["verify", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let s = stdout(&out);
    assert!(s.contains("FAIL") && s.contains("triple"), "{s}");

    let text = "bilinear ok\n\
                target mm 2 2 2\n\
                rank 7\n"
        .to_string()
        + &strassen_body(false)
        + "end\n";
    let okf = dir.join("ok.alg");
    fs::write(&okf, text).unwrap();
    let out = fastmm(&["verify", "--file", okf.to_str().unwrap()]);
    assert!(out.status.success());
}

/// The rank-7 coefficient listing, optionally with one sign flipped.
fn strassen_body(corrupt: bool) -> String {
    let mut s = String::new();
    let u = [
        (0, 0, 1),
        (0, 3, 1),
        (1, 2, 1),
        (1, 3, 1),
        (2, 0, 1),
        (3, 0, -1),
        (3, 2, 1),
        (4, 0, 1),
        (4, 1, 1),
        (5, 3, 1),
        (6, 1, 1),
        (6, 3, -1),
    ];
    let v = [
        (0, 0, 1),
        (0, 3, 1),
        (1, 0, 1),
        (2, 1, 1),
        (2, 3, -1),
        (3, 0, 1),
        (3, 1, 1),
        (4, 3, 1),
        (5, 0, -1),
        (5, 2, 1),
        (6, 2, 1),
        (6, 3, 1),
    ];
    let w = [
        (0, 0, 1),
        (0, 3, 1),
        (1, 2, 1),
        (1, 3, -1),
        (2, 1, 1),
        (2, 3, 1),
        (3, 3, 1),
        (4, 0, -1),
        (4, 1, 1),
        (5, 0, 1),
        (5, 2, 1),
        (6, 0, 1),
    ];
    for (q, i, c) in u {
        s += &format!("U {q} {i} {c}\n");
    }
    for (q, i, c) in v {
        s += &format!("V {q} {i} {c}\n");
    }
    for (idx, (q, i, c)) in w.iter().enumerate() {
        let c = if corrupt && idx == 0 { -c } else { *c };
        s += &format!("W {q} {i} {c}\n");
    }
    s
}

#[test]
fn exponent_values_print_to_seven_decimals() {
    let out = fastmm(&[
        "exponent", "--m", "2", "--k", "2", "--n", "2", "--rank", "7",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "2.8073549");

    let out = fastmm(&["exponent", "--apa", "--m", "7", "--k", "1", "--n", "7"]);
    assert!(out.status.success());
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!(v < 2.66);

    let out = fastmm(&[
        "exponent", "--m", "34", "--k", "34", "--n", "34", "--rank", "23120",
    ]);
    let v: f64 = stdout(&out).trim().parse().unwrap();
    assert!(v < 2.85);
}

#[test]
fn exponent_history_is_csv() {
    let out = fastmm(&["exponent", "--history"]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(s.starts_with("table,exponent,citation,year\n"));
    assert_eq!(s.lines().count(), 22);
    assert!(s.contains("2,2.7734,P82,1982"));
}

#[test]
fn aggregate_modes_report_ranks_and_write_verifiable_files() {
    let dir = tmpdir("agg");
    let two = dir.join("two.tri");
    let out = fastmm(&[
        "aggregate",
        "--mode",
        "two",
        "--m",
        "2",
        "--k",
        "2",
        "--n",
        "2",
        "--out",
        two.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("rank 20"));
    let out = fastmm(&["verify", "--file", two.to_str().unwrap()]);
    assert!(out.status.success(), "{}", stdout(&out));

    let out = fastmm(&[
        "aggregate",
        "--mode",
        "apa",
        "--m",
        "7",
        "--k",
        "1",
        "--n",
        "7",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("border rank 63"), "{}", stdout(&out));

    let three = dir.join("three.tri");
    let out = fastmm(&[
        "aggregate",
        "--mode",
        "three",
        "--m",
        "2",
        "--k",
        "2",
        "--n",
        "2",
        "--out",
        three.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(s.contains("8 aggregates"), "{s}");
    let out = fastmm(&["verify", "--file", three.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn aggregate_three_rejects_rectangles() {
    let out = fastmm(&[
        "aggregate",
        "--mode",
        "three",
        "--m",
        "2",
        "--k",
        "3",
        "--n",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binseg_ops_cross_check() {
    let out = fastmm(&["binseg", "--op", "sum", "--random", "1024", "0", "16"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("sum = "));

    let dir = tmpdir("binseg");
    let vecs = dir.join("uv.txt");
    fs::write(&vecs, "1 2 3\n4 5 6\n").unwrap();
    let out = fastmm(&["binseg", "--op", "inner", "--file", vecs.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("inner = 32"), "{}", stdout(&out));

    let pq = dir.join("pq.txt");
    fs::write(&pq, "1 1\n1 1\n").unwrap();
    let out = fastmm(&["binseg", "--op", "conv", "--file", pq.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("conv = 1,2,1"), "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(
        fastmm(&["multiply", "--alg", "bogus", "--n", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(fastmm(&["exponent"]).status.code(), Some(2));
    assert_eq!(
        fastmm(&["verify", "--builtin", "nope"]).status.code(),
        Some(2)
    );
    assert_eq!(fastmm(&["binseg", "--op", "inner"]).status.code(), Some(2));
}

#[test]
fn fastmm_seed_env_is_honored() {
    let run = |seed_env: Option<&str>| -> String {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fastmm"));
        cmd.args(["multiply", "--alg", "strassen", "--n", "4"]);
        cmd.env_remove("FASTMM_SEED");
        if let Some(s) = seed_env {
            cmd.env("FASTMM_SEED", s);
        }
        let out = cmd.output().unwrap();
        String::from_utf8_lossy(&out.stdout)
            .split("wall_ns")
            .next()
            .unwrap()
            .to_string()
    };
    // env seed equals the same seed passed by flag
    let via_env = run(Some("42"));
    let via_flag = {
        let out = fastmm(&["multiply", "--alg", "strassen", "--n", "4", "--seed", "42"]);
        stdout(&out).split("wall_ns").next().unwrap().to_string()
    };
    assert_eq!(via_env, via_flag);
}

#[test]
fn f64_ring_counts_match_exact_rings() {
    let int = fastmm(&[
        "multiply", "--alg", "strassen", "--n", "8", "--ring", "int", "--cutoff", "1",
    ]);
    let f64r = fastmm(&[
        "multiply", "--alg", "strassen", "--n", "8", "--ring", "f64", "--cutoff", "1",
    ]);
    assert!(int.status.success() && f64r.status.success());
    let counts = |s: &str| -> String {
        s.split_whitespace()
            .filter(|t| t.starts_with("mults=") || t.starts_with("adds="))
            .collect::<Vec<_>>()
            .join(" ")
    };
    assert_eq!(counts(&stdout(&int)), counts(&stdout(&f64r)));
}

#[test]
fn f64_ring_default_cutoff_is_sixty_four() {
    let out = fastmm(&["multiply", "--alg", "strassen", "--n", "8", "--ring", "f64"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("cutoff=64"), "{}", stdout(&out));
}
