use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conflict-sched"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const PAIR: &str = r#"{"version": 1, "n": 2, "m": 2, "T": 6, "p": [3, 3], "w": [1, 2], "r": [4, 5], "conflicts": [[0, 1]]}"#;

#[test]
fn solve_prints_the_optimum() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "pair.json", PAIR);
    let sched = dir.path().join("s.json");
    let out = run(&["solve", &inst, "-o", "minmax", "--schedule-out", sched.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["incumbent"], 6);
    assert_eq!(json["status"], "optimal");
    let check = run(&["check", &inst, sched.to_str().unwrap(), "-o", "minmax"]);
    assert_eq!(check.status.code(), Some(0));

    for method in ["oracle", "bs-native"] {
        let out = run(&["solve", &inst, "-o", "minmax", "-m", method]);
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(json["incumbent"], 6, "{method}");
    }
    let out = run(&["solve", &inst, "-o", "maxsum"]);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["incumbent"], 9);
}

#[test]
fn check_reports_violations() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(
        dir.path(),
        "i.json",
        r#"{"version": 1, "n": 2, "m": 2, "p": [3, 2], "conflicts": [[0, 1]]}"#,
    );
    let cases = [
        (r#"{"assignments": [{"job": 0, "machine": 0, "start": 0}, {"job": 1, "machine": 0, "start": 3}]}"#, 0, None),
        (r#"{"assignments": [{"job": 0, "machine": 0, "start": 0}, {"job": 1, "machine": 0, "start": 1}]}"#, 2, Some("machine-overlap")),
        (r#"{"assignments": [{"job": 0, "machine": 0, "start": 0}, {"job": 1, "machine": 1, "start": 2}]}"#, 2, Some("conflict-overlap")),
    ];
    for (k, (text, code, kind)) in cases.into_iter().enumerate() {
        let sched = write(dir.path(), &format!("s{k}.json"), text);
        let out = run(&["check", &inst, &sched, "-o", "minmax"]);
        assert_eq!(out.status.code(), Some(code), "case {k}");
        let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        match kind {
            None => assert_eq!(json["objective"], 5),
            Some(kind) => assert_eq!(json["violations"][0]["kind"], kind),
        }
    }
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"version": 1, "n": 3, "m": 1, "p": [1], "conflicts": []}"#);
    assert_eq!(run(&["solve", &bad, "-o", "minmax"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "/nonexistent.json", "-o", "minmax"]).status.code(), Some(2));
    let no_deadline = write(dir.path(), "nd.json", r#"{"version": 1, "n": 1, "m": 1, "p": [1], "conflicts": []}"#);
    assert_eq!(run(&["solve", &no_deadline, "-o", "maxsum"]).status.code(), Some(2));
}

#[test]
fn unproven_results_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "pair.json", PAIR);
    let out = run(&["solve", &inst, "-o", "minmax", "-m", "f2", "--solver-cmd", "false"]);
    assert_eq!(out.status.code(), Some(3));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["status"], "unknown");
}

#[test]
fn export_writes_lp() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "pair.json", PAIR);
    let out = run(&["export", &inst, "-f", "f3", "-o", "maxsum"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("Maximize\n obj: 4 zz_0 + 5 zz_1\n"), "{text}");
    assert!(text.contains(" conflict_slot_0_1_6:"));
    assert!(text.ends_with("End\n"));
}

#[test]
fn gen_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let grid = ["--mini", "--jobs", "4", "--machines", "2", "--capacities", "10,20", "--alphas", "1,2"];
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let mut args = vec!["gen", "--out", out_dir.to_str().unwrap()];
        args.extend(grid);
        assert_eq!(run(&args).status.code(), Some(0));
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 2 * 2 * 3);
    for name in names {
        assert_eq!(
            fs::read(dir.path().join("a").join(&name)).unwrap(),
            fs::read(dir.path().join("b").join(&name)).unwrap()
        );
    }
}

#[test]
fn bench_writes_csv_and_table() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(&[
        "bench", "--mini", "--jobs", "4", "--machines", "2", "--capacities", "10", "--settings", "1",
        "-o", "minmax", "-m", "native,bs-native,f1", "--desk", "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = String::from_utf8(out.stdout).unwrap();
    for label in ["Jobs", "Machines", "Capacity", "Conflict rate", "Setting", "Total"] {
        assert!(table.contains(label), "{label}\n{table}");
    }
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 4 * 3);
    assert!(text.lines().skip(1).filter(|l| l.contains(",f1,")).all(|l| l.contains(",skipped,")));
}
