use std::path::PathBuf;
use std::process::{Command, Output};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn gvd(args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_gvd"));
    cmd.current_dir(golden(""));
    for (k, _) in std::env::vars() {
        if k.starts_with("GVD_") {
            cmd.env_remove(k);
        }
    }
    cmd.args(args).output().unwrap()
}

/// Stdout without the timing and table statistics lines.
fn stable(out: &Output) -> String {
    String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with("tables ") && !l.starts_with("time "))
        .map(|l| format!("{l}\n"))
        .collect()
}

fn check(args: &[&str], code: i32, expected: &str) {
    let out = gvd(args);
    assert_eq!(
        out.status.code(),
        Some(code),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let want = std::fs::read_to_string(golden(expected)).unwrap();
    assert_eq!(stable(&out), want, "{args:?}");
}

#[test]
fn solve_outputs() {
    check(
        &[
            "solve",
            "--graph",
            "k5.gr",
            "--genus",
            "0",
            "--budget",
            "1",
            "--emit-witness",
        ],
        0,
        "solve_k5_g0_k1.out",
    );
    check(
        &["solve", "--graph", "k5.gr", "--genus", "0", "--budget", "0"],
        1,
        "solve_k5_g0_k0.out",
    );
    check(
        &[
            "solve", "--graph", "k33.gr", "--genus", "1", "--budget", "0",
        ],
        0,
        "solve_k33_g1_k0.out",
    );
    check(
        &[
            "solve",
            "--graph",
            "k5.gr",
            "--td",
            "k5.td",
            "--genus",
            "0",
            "--budget",
            "1",
            "--emit-witness",
        ],
        0,
        "solve_k5_td_g0_k1.out",
    );
}

#[test]
fn statistics_are_reported() {
    let out = gvd(&["solve", "--graph", "k5.gr", "--genus", "0", "--budget", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("tables nodes=")));
    assert!(text.lines().any(|l| l.starts_with("time ")));
}

#[test]
fn genus_outputs() {
    check(&["genus", "--graph", "k4.gr"], 0, "genus_k4.out");
    check(&["genus", "--graph", "k5.gr"], 0, "genus_k5.out");
    check(
        &["genus", "--graph", "k5.gr", "--orientable"],
        0,
        "genus_k5_orientable.out",
    );
    check(
        &["genus", "--embedding", "projective_loop.emb"],
        0,
        "genus_projective_loop.out",
    );
}

#[test]
fn oracle_and_enumeration_outputs() {
    check(&["oracle", "--graph", "k33.gr"], 0, "oracle_k33.out");
    check(
        &[
            "oracle", "--graph", "k33.gr", "--genus", "0", "--budget", "1",
        ],
        0,
        "oracle_k33_g0_k1.out",
    );
    check(
        &["enumerate-nice", "--labels", "0", "--genus", "0"],
        0,
        "enumerate_t0_g0.out",
    );
}

#[test]
fn gen_b_ell() {
    let out = gvd(&["gen", "b-ell", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("p tw 12 22"));
    assert_eq!(text.lines().count(), 23);
}

#[test]
fn json_report() {
    let out = gvd(&[
        "--json",
        "solve",
        "--graph",
        "k5.gr",
        "--genus",
        "0",
        "--budget",
        "1",
        "--emit-witness",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["answer"], "YES");
    assert_eq!(v["minimum"], 1);
    assert_eq!(v["witness"], serde_json::json!([1]));
    assert_eq!(v["verified"], true);
    let out = gvd(&["genus", "--graph", "k5.gr", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["genus"], 1);
}

#[test]
fn environment_overrides() {
    let out = Command::new(env!("CARGO_BIN_EXE_gvd"))
        .current_dir(golden(""))
        .env("GVD_GRAPH", "k5.gr")
        .env("GVD_GENUS", "1")
        .env("GVD_BUDGET", "0")
        .arg("solve")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stable(&out), "YES 0\n");
}

#[test]
fn errors_exit_two() {
    let out = gvd(&[
        "solve",
        "--graph",
        "missing.gr",
        "--genus",
        "0",
        "--budget",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.gr"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gr");
    std::fs::write(&bad, "p tw 2 1\n1 1\n").unwrap();
    let out = gvd(&[
        "solve",
        "--graph",
        bad.to_str().unwrap(),
        "--genus",
        "0",
        "--budget",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = gvd(&["solve", "--graph", "k5.gr"]);
    assert_eq!(out.status.code(), Some(2));
    let td = dir.path().join("short.td");
    std::fs::write(&td, "s td 1 2 5\nb 1 1 2\n").unwrap();
    let out = gvd(&[
        "solve",
        "--graph",
        "k5.gr",
        "--td",
        td.to_str().unwrap(),
        "--genus",
        "0",
        "--budget",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = gvd(&["oracle", "--graph", "k5.gr", "--max-schemes", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let out = gvd(&[
        "enumerate-nice",
        "--labels",
        "1",
        "--genus",
        "0",
        "--max-flags",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
