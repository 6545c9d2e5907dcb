use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn fairshare() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fairshare"));
    c.env_remove("FAIRSHARE_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    fairshare().args(args).output().unwrap()
}

fn run_with_input(args: &[&str], input: &[u8]) -> Output {
    let mut child = fairshare()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn ok(out: &Output) -> Value {
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> String {
    let p = dir.join(name);
    std::fs::write(&p, bytes).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn triangles_piped_into_shares() {
    let inst = run(&["generate", "triangles", "--n", "3"]);
    assert!(inst.status.success());
    let rep = ok(&run_with_input(&["shares", "--agent", "0"], &inst.stdout));
    assert_eq!(rep["agent"], 0);
    assert_eq!(rep["mms"], "1/1");
    assert_eq!(rep["aps"], "2/1");
}

#[test]
fn appendix_check_passes() {
    let rep = ok(&run(&[
        "verify",
        "appendix",
        "--k",
        "6",
        "--samples",
        "1000",
    ]));
    assert_eq!(rep["samples"], 1000);
    assert_eq!(rep["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn malformed_input_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", b"{\"m\": 3, \"agents\": [");
    let out = run(&["allocate", &bad, "--algo", "one-sixth"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.json"));

    let missing = dir.path().join("absent.json");
    let out = run(&["shares", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["allocate", "--algo", "best"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "appendix"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn wrong_strategy_count_is_rejected() {
    let inst = run(&["generate", "triangles", "--n", "3"]);
    assert!(inst.status.success());
    let out = run_with_input(&["bid", "--strategies", "greedy,zero"], &inst.stdout);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("2 strategies for 3 agents"));
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "generate",
        "random",
        "--class",
        "xos",
        "--m",
        "5",
        "--n",
        "3",
        "--entitlements",
        "random",
    ];
    let a = run(&[&["--seed", "17"], &args[..]].concat());
    let b = run(&[&["--seed", "17"], &args[..]].concat());
    let c = run(&[&["--seed", "18"], &args[..]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let from_env = fairshare()
        .env("FAIRSHARE_SEED", "17")
        .args(args)
        .output()
        .unwrap();
    assert_eq!(a.stdout, from_env.stdout);
}

#[test]
fn generated_instances_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for class in ["additive", "xos", "subadditive"] {
        let out = run(&[
            "--seed", "3", "generate", "random", "--class", class, "--m", "4", "--n", "2",
        ]);
        assert!(out.status.success(), "{class}");
        let path = write(dir.path(), &format!("{class}.json"), &out.stdout);
        let reps = ok(&run(&["shares", &path]));
        let reps = reps.as_array().unwrap();
        assert_eq!(reps.len(), 2);
        for r in reps {
            assert_eq!(r["entitlement"], "1/2");
            for key in ["mms", "aps", "mes"] {
                assert!(r[key].is_string(), "{class} {key}");
            }
        }
    }
}

#[test]
fn every_allocation_algorithm_runs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "--seed", "9", "generate", "random", "--class", "xos", "--m", "5", "--n", "3",
    ]);
    let path = write(dir.path(), "xos.json", &out.stdout);
    for algo in ["apsxos", "one-sixth", "four-seventeenths"] {
        let rep = ok(&run(&["allocate", &path, "--algo", algo]));
        let agents = rep["agents"].as_array().unwrap();
        assert_eq!(agents.len(), 3, "{algo}");
        let mut seen = 0u64;
        for a in agents {
            let bundle = a["bundle"].as_u64().unwrap();
            assert_eq!(bundle & seen, 0, "{algo}: overlapping bundles");
            seen |= bundle;
        }
    }
    let rep = ok(&run(&["allocate", &path, "--algo", "welfare-max"]));
    assert_eq!(rep["values"].as_array().unwrap().len(), 3);
}

#[test]
fn bidding_prints_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let inst = run(&["generate", "triangles", "--n", "3"]);
    assert!(inst.status.success());
    let path = write(dir.path(), "tri.json", &inst.stdout);
    let out = run(&[
        "--seed",
        "4",
        "bid",
        &path,
        "--strategies",
        "one-shot,random,greedy",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let lines: Vec<Value> = String::from_utf8(out.stdout.clone())
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let last = lines.last().unwrap();
    assert_eq!(last["bundles"].as_array().unwrap().len(), 3);
    for round in &lines[..lines.len() - 1] {
        assert!(round["winner"].is_u64());
    }
    let again = run(&[
        "--seed",
        "4",
        "bid",
        &path,
        "--strategies",
        "one-shot,random,greedy",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn batch_checks_pass() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, class) in ["xos", "subadditive", "additive"].iter().enumerate() {
        let out = run(&[
            "--seed",
            &i.to_string(),
            "generate",
            "random",
            "--class",
            class,
            "--m",
            "4",
            "--n",
            "2",
        ]);
        files.push(write(dir.path(), &format!("{i}.json"), &out.stdout));
    }
    let files: Vec<&str> = files.iter().map(String::as_str).collect();
    let rel = ok(&run(&[&["verify", "relations"], &files[..]].concat()));
    assert_eq!(rel.as_array().unwrap().len(), 6);
    let lad = ok(&run(&[&["verify", "ladder"], &files[..]].concat()));
    assert_eq!(lad.as_array().unwrap().len(), 6);
    let neg = ok(&run(&[
        "verify",
        "negative",
        "--k",
        "3",
        "--q",
        "2",
        "--samples",
        "4",
    ]));
    assert_eq!(neg["runs"].as_array().unwrap().len(), 9);
}

#[test]
fn exante_with_rounding() {
    let inst = run(&["generate", "vector", "--n", "2"]);
    let rep = ok(&run_with_input(
        &["exante", "--share", "mms", "--trials", "200"],
        &inst.stdout,
    ));
    assert!(rep["ratio"].is_string());
    assert_eq!(rep["rounding"]["agents"].as_array().unwrap().len(), 2);
}

#[test]
fn thread_count_does_not_change_output() {
    let one = run(&[
        "--jobs",
        "1",
        "verify",
        "appendix",
        "--k",
        "5",
        "--samples",
        "200",
    ]);
    let four = run(&[
        "--jobs",
        "4",
        "verify",
        "appendix",
        "--k",
        "5",
        "--samples",
        "200",
    ]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
}
