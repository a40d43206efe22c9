//! End-to-end tests of the `swaplab` binary: every subcommand, the exit-code
//! contract (0 ok, 1 claim violation, 2 usage/parse error), and output
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const TINY1: &str = "c tiny-1\np wcnf 2 2\n1 1 2 0\n1 -1 2 0\n";

fn swaplab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swaplab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Workspace {
        let dir = tempfile::tempdir().expect("temp dir");
        std::fs::write(dir.path().join("tiny1.wcnf"), TINY1).expect("fixture written");
        Workspace { dir }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn file(&self, name: &str) -> PathBuf {
        self.path().join(name)
    }

    fn read(&self, name: &str) -> String {
        std::fs::read_to_string(self.file(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
    }
}

#[test]
fn reduce_mufl_writes_instance_and_manifest() {
    let ws = Workspace::new();
    let out = swaplab(
        ws.path(),
        &["reduce", "--target", "mufl", "--c", "3/2", "tiny1.wcnf"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("facilities: 4"));
    assert!(text.contains("clients: 6"));
    let instance = ws.read("tiny1.mufl.json");
    assert!(instance.contains("\"kind\": \"mufl\""));
    assert!(instance.contains("\"3/2\""));
    let manifest = ws.read("tiny1.mufl.json.manifest.json");
    assert!(manifest.contains("\"subcommand\": \"reduce\""));
    assert!(manifest.contains("\"tiny1.wcnf\""));
}

#[test]
fn reduce_dkm_records_epsilon() {
    let ws = Workspace::new();
    let out = swaplab(ws.path(), &["reduce", "--target", "dkm", "tiny1.wcnf"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("K: 2"));
    assert!(text.contains("eps: 1/12"));
    let instance = ws.read("tiny1.dkm.json");
    assert!(instance.contains("\"eps\": \"1/12\""));
    assert!(instance.contains("\"K\": 2"));
}

#[test]
fn reduce_rejects_boundary_c() {
    let ws = Workspace::new();
    let out = swaplab(
        ws.path(),
        &["reduce", "--target", "mufl", "--c", "2", "tiny1.wcnf"],
    );
    assert_eq!(exit_code(&out), 2);
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "single-line error, got: {err}");
    assert!(err.starts_with("error:"));
}

#[test]
fn reduce_rejects_malformed_wcnf() {
    let ws = Workspace::new();
    std::fs::write(ws.file("bad.wcnf"), "p wcnf 1 1\n1 1 1 0\n").unwrap();
    let out = swaplab(ws.path(), &["reduce", "--target", "mufl", "bad.wcnf"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("distinct variables"));
}

#[test]
fn reduce_output_is_byte_identical_across_runs() {
    let ws = Workspace::new();
    let args = ["reduce", "--target", "dkm", "tiny1.wcnf", "--out", "a.json"];
    assert_eq!(exit_code(&swaplab(ws.path(), &args)), 0);
    let first = ws.read("a.json");
    let args = ["reduce", "--target", "dkm", "tiny1.wcnf", "--out", "b.json"];
    assert_eq!(exit_code(&swaplab(ws.path(), &args)), 0);
    assert_eq!(first, ws.read("b.json"));
}

#[test]
fn solve_mufl_from_all_open_reaches_the_best_local_optimum() {
    let ws = Workspace::new();
    swaplab(ws.path(), &["reduce", "--target", "mufl", "tiny1.wcnf"]);
    let out = swaplab(
        ws.path(),
        &["solve", "tiny1.mufl.json", "--log", "traj.tsv"],
    );
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("problem: mufl"));
    assert!(text.contains("start: {x1,~x1,x2,~x2} cost: 11"));
    assert!(text.contains("cost: 9\n"), "final cost 9: {text}");
    assert!(text.contains("terminated: local_optimum"));
    let log = ws.read("traj.tsv");
    for (index, line) in log.lines().enumerate() {
        let fields: Vec<&str> = line.split('\t').collect();
        assert_eq!(fields.len(), 3, "line `{line}`");
        assert_eq!(fields[0], (index + 1).to_string());
    }
    assert!(ws.file("traj.tsv.manifest.json").exists());
}

#[test]
fn solve_sat_from_given_assignment() {
    let ws = Workspace::new();
    let out = swaplab(ws.path(), &["solve", "tiny1.wcnf", "--start", "00"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("problem: sat"));
    assert!(text.contains("final: 01 cost: 2"));
    assert!(text.contains("local_optimum: true"));
}

#[test]
fn solve_with_zero_budget_reports_step_budget() {
    let ws = Workspace::new();
    let out = swaplab(
        ws.path(),
        &["solve", "tiny1.wcnf", "--start", "00", "--max-steps", "0"],
    );
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("steps: 0"));
    assert!(text.contains("terminated: step_budget"));
    // already-optimal starts still report a local optimum
    let out = swaplab(
        ws.path(),
        &["solve", "tiny1.wcnf", "--start", "11", "--max-steps", "0"],
    );
    assert!(stdout(&out).contains("terminated: local_optimum"));
}

#[test]
fn solve_rejects_infeasible_start_specs() {
    let ws = Workspace::new();
    swaplab(ws.path(), &["reduce", "--target", "dkm", "tiny1.wcnf"]);
    let out = swaplab(
        ws.path(),
        &["solve", "tiny1.dkm.json", "--start", "all-open"],
    );
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("K = 2"));
    let out = swaplab(
        ws.path(),
        &["solve", "tiny1.dkm.json", "--start", "x1,nope"],
    );
    assert_eq!(exit_code(&out), 2);
    let out = swaplab(ws.path(), &["solve", "tiny1.wcnf", "--start", "0102"]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn solve_random_start_is_deterministic_per_seed() {
    let ws = Workspace::new();
    swaplab(ws.path(), &["reduce", "--target", "dkm", "tiny1.wcnf"]);
    let args = [
        "solve",
        "tiny1.dkm.json",
        "--start",
        "random",
        "--seed",
        "7",
    ];
    let first = stdout(&swaplab(ws.path(), &args));
    let second = stdout(&swaplab(ws.path(), &args));
    assert_eq!(first, second);
    let other = stdout(&swaplab(
        ws.path(),
        &[
            "solve",
            "tiny1.dkm.json",
            "--start",
            "random",
            "--seed",
            "8",
        ],
    ));
    assert!(first.contains("problem: dkm") && other.contains("problem: dkm"));
}

#[test]
fn verify_clean_reductions_exit_zero() {
    let ws = Workspace::new();
    for target in ["mufl", "dkm"] {
        let out = swaplab(ws.path(), &["verify", "--target", target, "tiny1.wcnf"]);
        assert_eq!(exit_code(&out), 0, "target {target}: {}", stderr(&out));
        let text = stdout(&out);
        assert!(text.contains("violations: 0"));
        assert!(text.contains("\"violations\":[]"), "JSON line present");
    }
}

#[test]
fn verify_detects_a_corrupted_instance() {
    let ws = Workspace::new();
    swaplab(ws.path(), &["reduce", "--target", "mufl", "tiny1.wcnf"]);
    let tampered = ws.read("tiny1.mufl.json").replacen("\"3/2\"", "\"1/2\"", 1);
    std::fs::write(ws.file("tampered.json"), tampered).unwrap();
    let out = swaplab(
        ws.path(),
        &[
            "verify",
            "--target",
            "mufl",
            "--instance",
            "tampered.json",
            "tiny1.wcnf",
        ],
    );
    assert_eq!(exit_code(&out), 1, "stdout: {}", stdout(&out));
    assert!(stdout(&out).contains("closed-form-cost"));
}

#[test]
fn verify_writes_report_when_asked() {
    let ws = Workspace::new();
    let out = swaplab(
        ws.path(),
        &[
            "verify",
            "--target",
            "dkm",
            "tiny1.wcnf",
            "--out",
            "report.json",
        ],
    );
    assert_eq!(exit_code(&out), 0);
    let report = ws.read("report.json");
    assert!(report.contains("\"target\": \"dkm\""));
    assert!(ws.file("report.json.manifest.json").exists());
}

#[test]
fn embed_writes_coordinates_and_checks_the_bound() {
    let ws = Workspace::new();
    swaplab(ws.path(), &["reduce", "--target", "dkm", "tiny1.wcnf"]);
    let out = swaplab(
        ws.path(),
        &["embed", "tiny1.dkm.json", "--out", "embedded.json"],
    );
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("dimension: 5"));
    assert!(text.contains("dimension_bound: max{N,M}-1 = 1: satisfied"));
    let embedded = ws.read("embedded.json");
    assert!(embedded.contains("\"coords\""));
    // the embedded document still loads and keeps its meta block
    assert!(embedded.contains("\"eps\": \"1/12\""));
}

#[test]
fn embed_warns_when_gaps_approach_tolerance() {
    let ws = Workspace::new();
    swaplab(ws.path(), &["reduce", "--target", "dkm", "tiny1.wcnf"]);
    let out = swaplab(ws.path(), &["embed", "tiny1.dkm.json", "--tol", "0.001"]);
    assert!(stderr(&out).contains("warning: minimum distance gap"));
    // the default tolerance stays quiet
    let out = swaplab(ws.path(), &["embed", "tiny1.dkm.json"]);
    assert!(!stderr(&out).contains("warning"));
}

#[test]
fn embed_rejects_mufl_documents() {
    let ws = Workspace::new();
    swaplab(ws.path(), &["reduce", "--target", "mufl", "tiny1.wcnf"]);
    let out = swaplab(ws.path(), &["embed", "tiny1.mufl.json"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("dkm"));
}

#[test]
fn embed_rejects_non_euclidean_tables() {
    let ws = Workspace::new();
    let doc = r#"{
  "kind": "dkm",
  "sites": ["a", "b", "c"],
  "K": 1,
  "distances": ["0", "1", "0", "1", "9", "0"]
}
"#;
    std::fs::write(ws.file("bad.json"), doc).unwrap();
    let out = swaplab(ws.path(), &["embed", "bad.json"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("not embeddable"));
}

#[test]
fn oracle_campaign_runs_clean_and_deterministically() {
    let ws = Workspace::new();
    let args = [
        "oracle",
        "--count",
        "2",
        "--num-vars",
        "3",
        "--num-clauses",
        "4",
        "--seed",
        "5",
        "--out",
        "campaign.json",
    ];
    let out = swaplab(ws.path(), &args);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("campaign: 4 runs, 0 violations"));
    let first = ws.read("campaign.json");
    let out = swaplab(ws.path(), &args);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(first, ws.read("campaign.json"));
}

#[test]
fn usage_errors_exit_two() {
    let ws = Workspace::new();
    let out = swaplab(ws.path(), &["reduce", "tiny1.wcnf"]); // missing --target
    assert_eq!(exit_code(&out), 2);
    let out = swaplab(ws.path(), &["frobnicate"]);
    assert_eq!(exit_code(&out), 2);
    let out = swaplab(ws.path(), &["solve", "missing-file.wcnf"]);
    assert_eq!(exit_code(&out), 2);
}
