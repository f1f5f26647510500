use std::process::{Command, Output};

use nhspec::cli::{InfiniteRecord, LogNlsRecord, QuadRecord};
use nhspec::lognls::{solve_state, LogNlsConfig};
use nhspec::quadrature::{QuadratureRule, WeightSpec};

fn nhspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nhspec"))
        .args(args)
        .env_remove(nhspec::cli::THREADS_ENV)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn quad_weights_sum_to_mass() {
    let o = nhspec(&["quad", "--c", "1", "--interval", "0,inf", "--order", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let rec: QuadRecord = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rec.nodes.len(), 3);
    assert_eq!(rec.weights.len(), 3);
    let total: f64 = rec.weights.iter().sum();
    assert!((total - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12, "{total}");
}

#[test]
fn quad_json_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rule.json");
    let o = nhspec(&["quad", "--c", "0.7", "--interval", "-inf,1.5", "--order", "9", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let rec: QuadRecord = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let rule = QuadratureRule::from_spec(WeightSpec::new(0.7, f64::NEG_INFINITY, 1.5).unwrap(), 9).unwrap();
    assert_eq!(rec.nodes, rule.nodes);
    assert_eq!(rec.weights, rule.weights);
    assert_eq!(rec.interval, ["-inf".to_string(), "1.5".to_string()]);
}

#[test]
fn lognls_json_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("state.json");
    let o = nhspec(&["lognls", "--s", "2", "--state", "2", "--basis", "20", "--c", "1", "--nu", "0.8", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["E", "E_hat", "nodes_r", "iterations", "history"] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
    let rec: LogNlsRecord = serde_json::from_value(value).unwrap();
    let sol = solve_state(&LogNlsConfig::new(2.0, 2, 20, 1.0)).unwrap();
    assert_eq!(rec, LogNlsRecord::from(&sol));
}

#[test]
fn table5_json_layout_and_csv_digits() {
    let o = nhspec(&["reproduce", "--table", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let recs: Vec<InfiniteRecord> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(recs.len(), 10);
    assert!((recs[0].e - 1.156267).abs() < 1e-5);

    let o = nhspec(&["--format", "csv", "reproduce", "--table", "5"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("E,E_im,Delta,class"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1.15627");
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn confined_csv_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("psi.txt");
    let o = nhspec(&["pt-confined", "--potential", "x", "--T", "1", "--N", "4", "--format", "csv", "--emit-plot", plot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("index,re,im,class"));
    assert_eq!(text.lines().count(), 5);
    assert!(text.contains("2.48498"));
    let data = std::fs::read_to_string(&plot).unwrap();
    let rows: Vec<Vec<f64>> = data
        .lines()
        .filter(|l| !l.starts_with('#') && !l.is_empty())
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 401);
    assert!(rows.iter().all(|r| r.len() == 2));
    // ψ(±T) = 0 in the box basis
    assert!(rows[0][1].abs() < 1e-12 && rows[400][1].abs() < 1e-12);
}

#[test]
fn confined_scan_counts_pairs() {
    let o = nhspec(&["pt-confined", "--scan-T", "1:4:1", "--N", "4", "--format", "plot-text"]);
    assert_eq!(o.status.code(), Some(0));
    let counts: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().nth(1).unwrap().to_string())
        .collect();
    assert_eq!(counts, vec!["0", "0", "1", "2"]);
}

#[test]
fn infinite_states_flag() {
    let o = nhspec(&["pt-infinite", "--m", "3", "--alpha", "1", "--gamma", "0.5", "--N", "60", "--states", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let recs: Vec<InfiniteRecord> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(recs.len(), 4);
    assert!(recs.iter().all(|r| r.class == "REAL"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["bogus"],
        vec!["quad", "--c", "1", "--order", "3"],
        vec!["quad", "--c", "1", "--interval", "1,0", "--order", "3"],
        vec!["quad", "--c", "-1", "--interval", "0,1", "--order", "3"],
        vec!["lognls", "--s", "-1"],
        vec!["lognls", "--s", "1", "--nu", "1.5"],
        vec!["lognls", "--table1", "--table2"],
        vec!["pt-confined", "--T", "1", "--N", "4", "--potential", "x2"],
        vec!["reproduce", "--table", "6"],
        vec!["--format", "xml", "quad", "--c", "1", "--interval", "0,1", "--order", "2"],
    ] {
        let o = nhspec(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn non_convergence_exits_1() {
    let o = nhspec(&["lognls", "--s", "1", "--state", "2", "--max-iter", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no convergence"));
}

#[test]
fn thread_count_from_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_nhspec"))
            .args(["quad", "--c", "1", "--interval", "0,1", "--order", "4"])
            .env(nhspec::cli::THREADS_ENV, v)
            .output()
            .unwrap()
    };
    let (a, b) = (run("1"), run("3"));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn reproduce_every_table() {
    let lines = |t: &str| {
        let o = nhspec(&["--format", "csv", "reproduce", "--table", t]);
        assert_eq!(o.status.code(), Some(0), "table {t}: {}", String::from_utf8_lossy(&o.stderr));
        stdout(&o).lines().map(String::from).collect::<Vec<_>>()
    };
    let t1 = lines("1");
    assert_eq!(t1[0], "s,E,zero");
    assert_eq!(t1.len(), 12);
    let t2 = lines("2");
    assert_eq!(t2[0], "s,E,zero1,zero2");
    assert_eq!(t2.len(), 12);
    let t3 = lines("3");
    assert_eq!(t3[0], "index,T=1,T=3,T=4");
    assert_eq!(t3.len(), 5);
    let t4 = lines("4");
    assert_eq!(t4[0], "index,N=4,N=8,N=16,N=32");
    assert_eq!(t4.len(), 11);
    assert_eq!(lines("5").len(), 11);
}
