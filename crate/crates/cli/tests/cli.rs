//! End-to-end runs of the `qbailey` binary.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn qbailey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbailey"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn json_lines(s: &str) -> Vec<serde_json::Value> {
    s.lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

/// Partitions of `n` into parts from `allowed`, by dynamic programming.
fn restricted_partitions(allowed: impl Fn(usize) -> bool, top: usize) -> Vec<u64> {
    let mut p = vec![0u64; top];
    p[0] = 1;
    for part in (1..top).filter(|&j| allowed(j)) {
        for n in part..top {
            p[n] += p[n - part];
        }
    }
    p
}

/// CSV rows below the header as `(exponent_num, denom, coefficient)`.
fn csv_rows(s: &str) -> Vec<(i64, i64, String)> {
    let mut lines = s.lines();
    assert_eq!(lines.next(), Some("exponent_num,denom,coefficient"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                f[0].parse().unwrap(),
                f[1].parse().unwrap(),
                f[2].to_string(),
            )
        })
        .collect()
}

#[test]
fn rogers_ramanujan_cell_passes_and_emits_partition_counts() {
    let dir = TempDir::new().unwrap();
    let tables = dir.path().join("rr.csv");
    let cfg = write_config(
        &dir,
        "rr.toml",
        &format!(
            "target = \"corollary\"\norder_numerator = 50\ntables = {:?}\n[params]\nfamily = [\"N1\"]\nk = 2\ni = 2\ndelta = 1\n",
            tables.to_str().unwrap()
        ),
    );
    let out = qbailey(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&stdout(&out));
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["status"], "pass");
    assert_eq!(reports[0]["order"], "50");

    let oracle = restricted_partitions(|j| j % 5 == 1 || j % 5 == 4, 50);
    let mut coeffs = vec![0u64; 50];
    let mut rdr = csv::Reader::from_path(Path::new(&tables)).unwrap();
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let e: usize = rec[1].parse().unwrap();
        assert_eq!(&rec[2], "1");
        coeffs[e] = rec[3].parse().unwrap();
    }
    assert_eq!(coeffs, oracle);
}

#[test]
fn corrupted_delta_fails_with_first_mismatch() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.toml",
        "target = \"conjugate-pair\"\norder_numerator = 12\n[params]\nN = 2\nell = 0\nlambda = [[]]\nsigma = 0\nM = 3\n[corrupt]\nL = 2\nexponent_numerator = 5\n",
    );
    let out = qbailey(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let reports = json_lines(&stdout(&out));
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["status"], "fail");
    assert!(reports[0]["mismatch"]["exponent"].is_string());
}

#[test]
fn empty_range_exits_zero_with_no_cells() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "empty.toml",
        "target = \"thm44\"\norder_numerator = 10\n[params]\nN = { from = 2, to = 1 }\ndelta = 0\nk = 2\ni = 1\n",
    );
    let out = qbailey(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
}

#[test]
fn config_errors_exit_two_with_location() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "broken.toml",
        "target = \"thm44\"\norder_numerator = 10\n[params]\nk = 2\n",
    );
    let out = qbailey(&["run", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("params.delta"), "{err}");
    assert!(err.contains("line 3"), "{err}");

    let cfg = write_config(
        &dir,
        "syntax.toml",
        "target = \"thm44\"\norder_numerator = [\n",
    );
    assert_eq!(qbailey(&["run", &cfg]).status.code(), Some(2));
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "grid.toml",
        "target = \"gamma-delta-pair\"\norder_numerator = 10\n[params]\nN = [1, 2, 3]\nell = [0, 1]\nlambda = { max_weight = 2 }\nM = 2\n",
    );
    let one = qbailey(&["run", &cfg, "--workers", "1"]);
    let eight = qbailey(&["run", &cfg, "--workers", "8"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, eight.stdout);
    let reports = json_lines(&stdout(&one));
    assert!(reports.iter().any(|r| r["status"] == "skipped"));
    assert!(reports.iter().any(|r| r["status"] == "pass"));
    assert!(reports.iter().all(|r| r.get("wall_ms").is_none()));
}

#[test]
fn eval_string_function_leads_with_one() {
    let out = qbailey(&["eval", "string-function", "N=2", "l=0", "m=0", "order=10"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows[0].0, 0);
    assert_eq!(rows[0].2, "1");
    assert!(rows.iter().all(|(e, d, _)| *e < 10 * d));
}

#[test]
fn eval_residue_product_counts_partitions() {
    let out = qbailey(&[
        "eval",
        "residue-product",
        "mod=5",
        "exclude=0,2,3",
        "order=10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let oracle = restricted_partitions(|j| j % 5 == 1 || j % 5 == 4, 10);
    let mut got = vec![0u64; 10];
    for (e, d, c) in csv_rows(&stdout(&out)) {
        assert_eq!(d, 1);
        got[e as usize] = c.parse().unwrap();
    }
    assert_eq!(got, oracle);
}

#[test]
fn eval_gauss_binom_and_json() {
    let out = qbailey(&["eval", "gauss-binom", "top=4", "bottom=2"]);
    let coeffs: Vec<String> = csv_rows(&stdout(&out)).into_iter().map(|r| r.2).collect();
    assert_eq!(coeffs, ["1", "1", "2", "1", "1"]);

    let out = qbailey(&[
        "eval",
        "gauss-binom",
        "top=4",
        "bottom=2",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["denom"], 1);
    assert!(v["order"].is_null());
    assert_eq!(v["terms"][2], serde_json::json!([2, "2"]));
}

#[test]
fn eval_rejects_bad_input() {
    assert_eq!(qbailey(&["eval", "nope", "order=3"]).status.code(), Some(2));
    assert_eq!(
        qbailey(&["eval", "gauss-binom", "top=4", "bottom=2", "x=1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn audit_transforms_records_seed() {
    let out = qbailey(&[
        "audit-transforms",
        "--cases",
        "2",
        "--seed",
        "7",
        "--order",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let reports = json_lines(&stdout(&out));
    assert_eq!(reports.len(), 8);
    assert!(reports
        .iter()
        .all(|r| r["seed"] == 7 && r["status"] == "pass"));
}
