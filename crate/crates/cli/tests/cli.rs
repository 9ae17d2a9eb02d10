//! End-to-end checks of the command-line interface: exit codes, golden-file
//! round trips, and deterministic output.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entangle-cert"))
}

fn repo_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../..")
        .canonicalize()
        .unwrap()
}

fn golden(name: &str) -> PathBuf {
    repo_root().join("states").join(name)
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env("ENTANGLE_CERT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn generate_matches_the_shipped_goldens() {
    let cases: Vec<(Vec<&str>, &str)> = vec![
        (vec!["generate", "--family", "ubb"], "ubb.json"),
        (vec!["generate", "--family", "omega"], "omega.json"),
        (vec!["generate", "--family", "set-s0"], "s0.json"),
        (vec!["generate", "--family", "set-sz", "--z", "0"], "sz-0.json"),
        (vec!["generate", "--family", "set-sz", "--z", "1"], "sz-1.json"),
        (vec!["generate", "--family", "set-sz", "--z", "i"], "sz-i.json"),
        (
            vec!["generate", "--family", "set-sz", "--z", "1+i"],
            "sz-1plusi.json",
        ),
        (
            vec!["generate", "--family", "set-sz", "--z=-2"],
            "sz-neg2.json",
        ),
        (
            vec!["generate", "--family", "basis", "--a1=-2", "--b1", "i"],
            "basis-a-neg2-b-i.json",
        ),
        (
            vec!["generate", "--family", "basis", "--a1", "3", "--b1", "2i"],
            "basis-a-3-b-2i.json",
        ),
    ];
    for (args, file) in cases {
        let out = run(&args);
        assert!(out.status.success(), "{args:?}");
        let want = std::fs::read_to_string(golden(file)).unwrap();
        assert_eq!(stdout(&out), want, "golden mismatch for {file}");
    }
}

#[test]
fn generate_is_deterministic_and_round_trips() {
    let a = run(&["generate", "--family", "set-sz", "--z", "1+i"]);
    let b = run(&["generate", "--family", "set-sz", "--z", "1+i"]);
    assert_eq!(stdout(&a), stdout(&b));
    // parse and re-serialize through analyze input handling: feed the file
    // back through tables, which parses it
    let dir = std::env::temp_dir().join("entangle-cert-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sz.json");
    std::fs::write(&path, stdout(&a)).unwrap();
    let out = run(&["tables", path.to_str().unwrap()]);
    assert!(out.status.success());
}

#[test]
fn generate_rejects_unit_square_parameters() {
    let out = run(&["generate", "--family", "basis", "--a1=-2", "--b1", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("b1"), "{err}");
}

#[test]
fn analyze_exit_codes_follow_verdicts() {
    let out = run(&[
        "analyze",
        golden("ubb.json").to_str().unwrap(),
        "--check",
        "strong-nonlocality,ubb",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("check strong-nonlocality: holds"));
    assert!(text.contains("check ubb: holds"));

    let out = run(&[
        "analyze",
        golden("s0.json").to_str().unwrap(),
        "--check",
        "strong-nonlocality",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("check strong-nonlocality: fails"));
    assert!(text.contains("witness on BC"), "witness section expected:\n{text}");
    assert!(text.contains("M0:"));

    // no witness construction available for the unextendible basis
    let out = run(&[
        "analyze",
        golden("ubb.json").to_str().unwrap(),
        "--check",
        "opm",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_rejects_malformed_input() {
    let dir = std::env::temp_dir().join("entangle-cert-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("garbage.json");
    std::fs::write(&path, "{ this is not json").unwrap();
    let out = run(&[
        "analyze",
        path.to_str().unwrap(),
        "--check",
        "orthogonality",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line"), "{err}");
}

#[test]
fn analyze_requires_exactly_one_input() {
    let out = run(&["analyze", "--check", "orthogonality"]);
    assert_eq!(out.status.code(), Some(4));
    let out = run(&[
        "analyze",
        golden("ubb.json").to_str().unwrap(),
        "--family",
        "ubb",
        "--check",
        "orthogonality",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn tables_reproduce_the_published_layout() {
    let out = run(&["tables", golden("ubb.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("product index: 6"));
    assert!(text.contains("5*x3^6-18*x3^5+33*x3^4-60*x3^3+51*x3^2-42*x3+7"));
    assert!(text.contains("0.207481"));
    assert!(text.contains("2.429704"));
    assert!(text.contains("0.030984+1.511701i"));
    assert!(text.contains("-5.443347"));
    assert!(text.contains("gram off-diagonal entries all nonzero: true"));

    // a product-free input has no table
    let out = run(&["tables", golden("omega.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("product index: 0"));
    assert!(text.contains("no table"));
}

#[test]
fn json_report_is_well_formed() {
    let out = run(&[
        "analyze",
        golden("ubb.json").to_str().unwrap(),
        "--check",
        "orthogonality,qces",
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["set"], "ubb-U");
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    assert_eq!(checks[0]["property"], "orthogonality");
    assert_eq!(checks[0]["verdict"], "holds");
    assert_eq!(checks[1]["property"], "qces");
    assert_eq!(checks[1]["evidence"]["index"], 6);
    assert!(checks[0]["ms"].is_number());
}
