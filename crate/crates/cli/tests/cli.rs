//! End-to-end tests of the binary: exit codes, determinism, formats, and
//! config-file merging.

use std::io::Write;
use std::process::{Command, Output};

fn gnpmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gnpmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write_temp(name: &str, content: &str) -> String {
    let path = std::env::temp_dir().join(format!("gnpmod-test-{}-{name}", std::process::id()));
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(content.as_bytes()).unwrap();
    path.to_str().unwrap().to_string()
}

const K4_TEXT: &str = "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

#[test]
fn count_on_k4() {
    let host = write_temp("k4.txt", K4_TEXT);
    let out = gnpmod(&["count", "--host-file", &host, "--pattern", "K3", "--q", "2"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["result"]["copies"], "4");
    assert_eq!(doc["result"]["embeddings"], "24");
    assert_eq!(doc["result"]["copies_mod_q"], 0);
}

#[test]
fn identical_argv_and_seed_give_identical_stdout() {
    let args = [
        "simulate", "--family", "K3", "--n", "20", "--p", "0.4", "--q", "2", "--trials", "300",
        "--seed", "9", "--no-meta",
    ];
    let a = gnpmod(&args);
    let b = gnpmod(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "stdout must be byte-identical");
}

#[test]
fn output_is_invariant_to_thread_count() {
    let base = [
        "simulate", "--family", "K3,K4", "--n", "25", "--p", "0.3", "--q", "3", "--trials",
        "400", "--seed", "13", "--no-meta",
    ];
    let mut one = base.to_vec();
    one.extend(["--threads", "1"]);
    let mut eight = base.to_vec();
    eight.extend(["--threads", "8"]);
    let a = gnpmod(&one);
    let b = gnpmod(&eight);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn meta_block_appears_unless_suppressed() {
    let args = [
        "simulate", "--family", "K3", "--n", "10", "--p", "0.5", "--q", "2", "--trials", "50",
        "--seed", "1",
    ];
    let with_meta: serde_json::Value = serde_json::from_str(&stdout(&gnpmod(&args))).unwrap();
    assert!(with_meta.get("meta").is_some());
    let mut quiet = args.to_vec();
    quiet.push("--no-meta");
    let without: serde_json::Value = serde_json::from_str(&stdout(&gnpmod(&quiet))).unwrap();
    assert!(without.get("meta").is_none());
}

#[test]
fn validation_errors_exit_one() {
    // Missing required flag.
    let out = gnpmod(&["simulate", "--family", "K3", "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value =
        serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap();
    assert!(err["error"]["code"].is_string());

    // Isomorphic family members.
    let out = gnpmod(&[
        "simulate", "--family", "K3,C3", "--n", "10", "--p", "0.5", "--q", "2", "--trials",
        "10", "--seed", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Boundary alpha: 1/alpha hits m(K4) exactly.
    let out = gnpmod(&[
        "corollary", "--family", "K3,K4", "--alpha", "2/3", "--n", "50", "--q", "2",
        "--trials", "10", "--seed", "0",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // Malformed graph file.
    let bad = write_temp("bad.txt", "2 1\n0 0\n");
    let out = gnpmod(&["count", "--host-file", &bad, "--pattern", "K3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn runtime_errors_exit_two() {
    // K8 as a charsum host has 28 edge variables, over the budget.
    let k8 = write_temp("k8.txt", {
        let mut s = String::from("8 28\n");
        for u in 0..8 {
            for w in u + 1..8 {
                s.push_str(&format!("{u} {w}\n"));
            }
        }
        Box::leak(s.into_boxed_str())
    });
    let out = gnpmod(&[
        "charsum", "--host-file", &k8, "--family", "K3", "--c", "1", "--q", "2",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_fills_gaps_and_flags_win() {
    let cfg = write_temp(
        "config.json",
        r#"{"family": "K3", "n": 12, "p": 0.5, "q": 2, "trials": 100, "seed": 4}"#,
    );
    let from_config = gnpmod(&["simulate", "--config", &cfg, "--no-meta"]);
    assert!(from_config.status.success(), "{from_config:?}");
    let doc: serde_json::Value = serde_json::from_str(&stdout(&from_config)).unwrap();
    assert_eq!(doc["result"]["config"]["n"], 12);

    // A flag overrides the config value.
    let overridden = gnpmod(&["simulate", "--config", &cfg, "--n", "15", "--no-meta"]);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&overridden)).unwrap();
    assert_eq!(doc["result"]["config"]["n"], 15);
}

#[test]
fn formats_and_out_file() {
    let csv = gnpmod(&[
        "decay", "--family", "K3", "--p-exp", "-2/3", "--p-scale", "4", "--n-grid", "10,14",
        "--q", "2", "--trials", "50", "--seed", "2", "--format", "csv",
    ]);
    assert!(csv.status.success());
    let body = stdout(&csv);
    assert!(body.starts_with("n,p,log_phi,tv,bias_scale"));
    assert_eq!(body.lines().count(), 3);

    // CSV is meaningless for count: validation error.
    let host = write_temp("k4b.txt", K4_TEXT);
    let out = gnpmod(&[
        "count", "--host-file", &host, "--pattern", "K3", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // --out writes the file and stdout stays empty.
    let target = std::env::temp_dir().join(format!("gnpmod-out-{}.json", std::process::id()));
    let out = gnpmod(&[
        "invariants", "--family", "K3,K4", "--out", target.to_str().unwrap(), "--no-meta",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(doc["result"]["threshold_exponent"], "-2/3");
    std::fs::remove_file(target).ok();
}

#[test]
fn two_step_flag_changes_the_sample_but_not_the_contract() {
    let base = [
        "simulate", "--family", "K3", "--n", "20", "--p", "0.3", "--q", "2", "--trials",
        "200", "--seed", "5", "--no-meta",
    ];
    let direct = gnpmod(&base);
    let mut two = base.to_vec();
    two.push("--two-step");
    let two_step = gnpmod(&two);
    assert!(direct.status.success() && two_step.status.success());
    assert_ne!(direct.stdout, two_step.stdout);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&two_step)).unwrap();
    let hist = doc["result"]["histogram"].as_array().unwrap();
    let total: u64 = hist.iter().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 200);
}
