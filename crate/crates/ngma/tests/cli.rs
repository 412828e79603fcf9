//! End-to-end tests of the `ngma` binary: file formats, exit codes, and
//! output stability.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ngma"))
}

fn write_scenario(path: &Path) {
    // single-antenna two-user uplink scenario: gains 10 and 1, unit noise
    let json = r#"{
        "n_antennas": 1,
        "n_users": 2,
        "channels": [[[3.1622776601683795, 0.0]], [[1.0, 0.0]]],
        "noise_powers": [1.0, 1.0],
        "power_budget": 1.0
    }"#;
    std::fs::write(path, json).unwrap();
}

#[test]
fn region_bc_emits_expected_corner() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bc.csv");
    let status = bin()
        .args([
            "region",
            "--bc",
            "--snr1-db",
            "10",
            "--snr2-db",
            "0",
            "--power",
            "1",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "scheme,R1,R2");
    let corner = text.lines().skip(1).any(|line| {
        let mut cols = line.split(',');
        let scheme = cols.next().unwrap();
        let r1: f64 = cols.next().unwrap().parse().unwrap();
        let r2: f64 = cols.next().unwrap().parse().unwrap();
        scheme == "noma" && (r1 - 11f64.log2()).abs() <= 1e-6 && r2.abs() <= 1e-6
    });
    assert!(corner, "missing (log2 11, 0) NOMA row in:\n{}", text);
}

#[test]
fn rate_ul_scalar_two_user_table() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.json");
    write_scenario(&scenario);
    let config = dir.path().join("ul.json");
    std::fs::write(
        &config,
        r#"{"layers": [[1], [2]], "detector": "mrc", "powers": [1.0, 1.0]}"#,
    )
    .unwrap();
    let out = dir.path().join("rates.csv");
    let status = bin()
        .args(["rate-ul"])
        .arg("--scenario")
        .arg(&scenario)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let rows: Vec<(usize, usize, f64)> = text
        .lines()
        .skip(1)
        .map(|line| {
            let mut cols = line.split(',');
            (
                cols.next().unwrap().parse().unwrap(),
                cols.next().unwrap().parse().unwrap(),
                cols.next().unwrap().parse().unwrap(),
            )
        })
        .collect();
    assert_eq!(rows.len(), 2);
    // user 1 decoded first: log2(1 + 10/2); user 2 decoded clean: log2 2
    assert_eq!(rows[0].0, 1);
    assert!((rows[0].2 - 6f64.log2()).abs() <= 1e-9);
    assert_eq!(rows[1].0, 2);
    assert!((rows[1].2 - 1.0).abs() <= 1e-9);
}

#[test]
fn rate_dl_reports_feasibility() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("scenario.json");
    write_scenario(&scenario);
    let config = dir.path().join("dl.json");
    // strong user cancels the weak user's signal; 20/80 power split
    std::fs::write(
        &config,
        r#"{
            "clusters": [[1, 2]],
            "order": [[2, 1]],
            "directions": "matched",
            "powers": [0.2, 0.8]
        }"#,
    )
    .unwrap();
    let out = dir.path().join("rates.csv");
    let status = bin()
        .args(["rate-dl"])
        .arg("--scenario")
        .arg(&scenario)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next().unwrap(), "user,cluster,rate,feasible");
    assert_eq!(text.lines().count(), 3);
    assert!(
        text.lines().skip(1).all(|l| l.ends_with("true")),
        "{}",
        text
    );
}

#[test]
fn empty_scenario_file_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = dir.path().join("empty.json");
    std::fs::write(&scenario, "").unwrap();
    let config = dir.path().join("ul.json");
    std::fs::write(
        &config,
        r#"{"layers": [[1], [2]], "detector": "mrc", "powers": [1.0, 1.0]}"#,
    )
    .unwrap();
    let out = dir.path().join("never.csv");
    let output = bin()
        .args(["rate-ul"])
        .arg("--scenario")
        .arg(&scenario)
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists(), "output file was created on failure");
    assert!(String::from_utf8_lossy(&output.stderr).starts_with("error:"));
}

#[test]
fn oversized_search_exits_3() {
    let output = bin()
        .args([
            "search-dl",
            "--users",
            "4",
            "--antennas",
            "4",
            "--seed",
            "1",
            "--power-grid",
            "8",
            "--cap",
            "10",
            "--out",
            "/tmp/never-ngma.json",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(!Path::new("/tmp/never-ngma.json").exists());
}

#[test]
fn compare_emits_one_row_per_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("compare.csv");
    let status = bin()
        .args([
            "compare",
            "--users",
            "4",
            "--antennas",
            "2",
            "--seed",
            "3",
            "--power-grid",
            "2",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scheme,value,feasible,evaluations");
    let schemes: Vec<&str> = lines[1..]
        .iter()
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(schemes, ["SDMA", "BB-NOMA", "CB-NOMA", "NGMA"]);
    // the unrestricted row must weakly dominate every restricted row
    let value = |row: &str| -> f64 { row.split(',').nth(1).unwrap().parse().unwrap() };
    let ngma = value(lines[4]);
    for row in &lines[1..4] {
        if !row.contains(",NA,") {
            assert!(ngma >= value(row) - 1e-12, "{}", text);
        }
    }
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "search-ul",
        "--users",
        "3",
        "--antennas",
        "2",
        "--seed",
        "9",
        "--detector",
        "mrc",
        "--power-grid",
        "3",
    ];
    let out1 = dir.path().join("t1.json");
    let out2 = dir.path().join("t2.json");
    for (threads, out) in [("1", &out1), ("4", &out2)] {
        let status = bin()
            .args(args)
            .arg("--out")
            .arg(out)
            .env("NGMA_THREADS", threads)
            .status()
            .unwrap();
        assert!(status.success());
    }
    assert_eq!(std::fs::read(&out1).unwrap(), std::fs::read(&out2).unwrap());
}
