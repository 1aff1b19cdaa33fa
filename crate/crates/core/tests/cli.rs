//! End-to-end tests of the `semirandom` binary.

use std::process::{Command, Output};

use semirandom::trial::CSV_HEADER;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semirandom"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn sweep_writes_the_exact_header_and_one_row_per_trial() {
    let out = run(&[
        "--n",
        "100,200",
        "--d",
        "2,4",
        "--trials",
        "3",
        "--no-wallclock",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 1 + 2 * 2 * 3);
    let summary = String::from_utf8(out.stderr).unwrap();
    assert_eq!(summary.lines().count(), 4);
    assert!(summary.contains("n=100 d=2 trials=3"));
}

#[test]
fn output_is_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for workers in ["1", "3"] {
        let path = dir.path().join(format!("w{workers}.csv"));
        let out = run(&[
            "--n",
            "150",
            "--d",
            "2,3,4,5",
            "--trials",
            "5",
            "--seed",
            "9",
            "--workers",
            workers,
            "--no-wallclock",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        bodies.push(std::fs::read(&path).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
}

#[test]
fn replay_reproduces_a_row() {
    let text = stdout(&run(&[
        "--n",
        "120",
        "--d",
        "3",
        "--trials",
        "2",
        "--seed",
        "40",
        "--no-wallclock",
    ]));
    let row = text.lines().nth(2).unwrap();
    let out = run(&["replay", "--row", row]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(stdout(&out).trim_end(), row);
}

#[test]
fn replay_rejects_rows_with_foreign_budgets() {
    let text = stdout(&run(&[
        "--n",
        "120",
        "--d",
        "2",
        "--trials",
        "1",
        "--no-wallclock",
    ]));
    let row = text.lines().nth(1).unwrap();
    let mut fields: Vec<String> = row.split(',').map(String::from).collect();
    fields[5] = "0.9".into(); // eps
    let out = run(&["replay", "--row", &fields.join(",")]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn replay_surfaces_invalid_omega_as_a_config_error() {
    let text = stdout(&run(&[
        "--n",
        "120",
        "--d",
        "4",
        "--trials",
        "1",
        "--no-wallclock",
    ]));
    let row = text.lines().nth(1).unwrap();
    let mut fields: Vec<String> = row.split(',').map(String::from).collect();
    fields[4] = "0.5".into(); // omega
    let out = run(&["replay", "--row", &fields.join(",")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("error"));
}

#[test]
fn json_lines_mirror_the_columns() {
    let text = stdout(&run(&[
        "--n",
        "80",
        "--d",
        "2",
        "--trials",
        "2",
        "--format",
        "json",
        "--no-wallclock",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut expected: Vec<&str> = CSV_HEADER.split(',').collect();
        expected.sort_unstable();
        let mut keys = keys;
        keys.sort_unstable();
        assert_eq!(keys, expected);
    }
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("sweep.conf");
    std::fs::write(&cfg, "# sweep\nn = 90\nd = 5\ntrials = 4\nseed = 3\n").unwrap();
    let text = stdout(&run(&[
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "2",
        "--no-wallclock",
    ]));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("3,90,5,real,"));
    assert!(rows[1].starts_with("4,90,5,real,"));
}

#[test]
fn invalid_arguments_exit_with_an_error() {
    assert_eq!(
        run(&["--n", "100", "--mode", "fake"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["--n", "100", "--d", "1"]).status.code(), Some(2));
    assert_eq!(run(&["--n", "100", "--eps", "0"]).status.code(), Some(2));
}

#[test]
fn plan_prints_phase_boundaries() {
    let text = stdout(&run(&["plan", "--n", "1000", "--d", "4", "--omega", "4"]));
    assert!(text.starts_with("n=1000 d=4 t=4491 b=2600 matching1<="));
    assert!(text.trim_end().ends_with("boost<=4491"));
    // four literal matching phases of 1727 rounds do not fit in 4491
    let out = run(&[
        "plan",
        "--n",
        "1000",
        "--d",
        "4",
        "--schedule",
        "literal",
        "--omega",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
