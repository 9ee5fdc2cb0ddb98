use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use fairpid::dist::{JointDist, Units};
use fairpid::fairness::audit;
use fairpid::ingest::{ingest_csv, CsvColumns};
use fairpid::pid::SolverConfig;
use fairpid::report::{exit, run_audit, run_sweep, sweep_rows, AuditReport, ReportOptions, SWEEP_COLUMNS};
use fairpid::scenario::{generate_scenario, DistFile, ScenarioKind, ScenarioSpec};
use serde_json::Value;

fn fairpid(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairpid")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scenario_dist(kind: ScenarioKind) -> JointDist {
    generate_scenario(&ScenarioSpec::new(kind)).unwrap().remove(0).dist
}

/// Writes every cell `round(p * n)` times as a CSV record.
fn materialize(dist: &JointDist, n: f64, path: &Path) {
    let mut f = std::fs::File::create(path).unwrap();
    writeln!(f, "z,yhat,y").unwrap();
    for c in DistFile::from_dist(dist).cells {
        let k = (c.p * n).round();
        assert!((k - c.p * n).abs() < 1e-9, "multiplicity not integral");
        for _ in 0..k as usize {
            writeln!(f, "{},{},{}", c.z, c.yhat, c.y).unwrap();
        }
    }
}

fn as_f64(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn example4_json_report() {
    let out = fairpid(&["scenario", "example4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    assert!(text.contains("\"pp\": 0.531004"), "{text}");
    let v = json(&out);
    assert!((as_f64(&v["gaps"]["pp"]) - 0.531).abs() < 1e-3);
    assert_eq!(v["theorems"]["t3"]["premise"], true);
    assert_eq!(v["theorems"]["t3"]["holds"], true);
    assert_eq!(v["solver"]["converged"], true);
}

#[test]
fn report_has_fixed_key_set() {
    let out = fairpid(&["scenario", "example1"]);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let at = |k: &str| text.find(&format!("\n  \"{k}\":")).unwrap();
    assert!(at("meta") < at("gaps") && at("gaps") < at("pid") && at("pid") < at("theorems") && at("theorems") < at("solver"));
    let v = json(&out);
    let keys = |v: &Value| {
        let mut k = v.as_object().unwrap().keys().cloned().collect::<Vec<_>>();
        k.sort();
        k
    };
    assert_eq!(keys(&v), ["gaps", "meta", "pid", "solver", "theorems"]);
    assert_eq!(keys(&v["gaps"]), ["dataset_mi", "eo", "pp", "sp"]);
    assert_eq!(keys(&v["pid"]), ["red", "syn", "uni_label", "uni_pred"]);
    assert_eq!(keys(&v["theorems"]), ["t1", "t2", "t3", "t4", "t5"]);
    for t in ["t1", "t2", "t3", "t4", "t5"] {
        assert_eq!(keys(&v["theorems"][t]), ["holds", "margin", "premise"]);
    }
    assert_eq!(keys(&v["solver"]), ["converged", "gap", "iters"]);
}

#[test]
fn numbers_have_six_decimals() {
    let text = String::from_utf8(fairpid(&["scenario", "example2"]).stdout).unwrap();
    for line in text.lines().filter(|l| l.contains("\"sp\"") || l.contains("\"red\"")) {
        let num = line.split(':').nth(1).unwrap().trim().trim_end_matches(',');
        assert_eq!(num.split('.').nth(1).unwrap().len(), 6, "{line}");
    }
}

#[test]
fn json_round_trips() {
    let out = fairpid(&["scenario", "motivational"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: AuditReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.to_json(), text);
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [&["scenario", "example3"][..], &["sweep", "sp_zero_family", "--param", "samples=5", "--seed", "9"]] {
        let a = fairpid(args);
        let b = fairpid(args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn independent_triple_from_dist_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("indep.json");
    std::fs::write(
        &path,
        r#"{"alphabets":{"z":["a","b"],"yhat":["0","1"],"y":["0","1"]},
            "cells":[{"z":"a","yhat":"0","y":"0","p":0.12},{"z":"a","yhat":"0","y":"1","p":0.06},
                     {"z":"a","yhat":"1","y":"0","p":0.06},{"z":"a","yhat":"1","y":"1","p":0.36},
                     {"z":"b","yhat":"0","y":"0","p":0.08},{"z":"b","yhat":"0","y":"1","p":0.04},
                     {"z":"b","yhat":"1","y":"0","p":0.04},{"z":"b","yhat":"1","y":"1","p":0.24}]}"#,
    )
    .unwrap();
    let out = fairpid(&["audit", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    for (section, key) in [("gaps", "sp"), ("gaps", "eo"), ("gaps", "pp"), ("gaps", "dataset_mi")]
        .into_iter()
        .chain(["uni_pred", "uni_label", "red", "syn"].map(|k| ("pid", k)))
    {
        assert_eq!(as_f64(&v[section][key]), 0.0, "{section}.{key}");
    }
    assert_eq!(v["theorems"]["t1"]["premise"], false);
    assert_eq!(v["theorems"]["t1"]["holds"], true);
}

#[test]
fn corrupted_csv_is_an_ingestion_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "z,yhat,y\n0,1,1\n1,0\n").unwrap();
    let out = fairpid(&["audit", "--input", path.to_str().unwrap(), "--z-col", "z", "--y-col", "y", "--yhat-col", "yhat"]);
    assert_eq!(code(&out), exit::INGESTION);
    assert!(out.stdout.is_empty());
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["error"]["code"], exit::INGESTION);

    let missing = fairpid(&["audit", "--input", "/nonexistent/x.csv", "--z-col", "z", "--y-col", "y"]);
    assert_eq!(code(&missing), exit::INGESTION);
    assert!(missing.stdout.is_empty());
}

#[test]
fn spec_and_flag_errors() {
    for args in [
        &["scenario", "example9"][..],
        &["scenario", "example2", "--param", "rho=1.5"],
        &["scenario", "example2", "--param", "q=0.1"],
        &["audit", "--bogus"],
        &["sweep", "example1"],
        &["scenario", "example1", "--tol", "-1"],
    ] {
        let out = fairpid(args);
        assert_eq!(code(&out), exit::SPEC, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
    }
    assert_eq!(code(&fairpid(&["--help"])), exit::SUCCESS);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let out = fairpid(&["scenario", "example2", "--max-iters", "3"]);
    assert_eq!(code(&out), exit::NON_CONVERGENCE);
    assert_eq!(json(&out)["solver"]["converged"], false);
}

#[test]
fn theorem_breach_maps_to_its_own_code() {
    let opts = ReportOptions::default();
    let mut report = run_audit(&scenario_dist(ScenarioKind::Example1), &SolverConfig::default(), &opts).unwrap();
    assert_eq!(report.exit_code(), exit::SUCCESS);
    report.theorems.as_mut().unwrap().t3.holds = false;
    assert_eq!(report.exit_code(), exit::THEOREM_BREACH);
    assert_eq!(report.breaches(), ["t3"]);
    report.solver.as_mut().unwrap().converged = false;
    assert_eq!(report.exit_code(), exit::NON_CONVERGENCE);
}

#[test]
fn csv_of_example1_multiplicities() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ex1.csv");
    materialize(&scenario_dist(ScenarioKind::Example1), 400.0, &path);
    let out = fairpid(&["audit", "--input", path.to_str().unwrap(), "--z-col", "z", "--y-col", "y", "--yhat-col", "yhat"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["meta"]["records"], 400);
    assert_eq!(as_f64(&v["gaps"]["sp"]), 1.0);
    assert_eq!(as_f64(&v["gaps"]["eo"]), 1.0);
    assert_eq!(as_f64(&v["gaps"]["pp"]), 0.0);
}

#[test]
fn csv_and_scenario_audit_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SolverConfig::default();
    let cols = CsvColumns::new("z", "y", Some("yhat"));
    for (kind, n) in [
        (ScenarioKind::Example1, 4.0),
        (ScenarioKind::Example2, 20.0),
        (ScenarioKind::Example3, 4.0),
        (ScenarioKind::Example4, 40.0),
        (ScenarioKind::Motivational, 256.0),
    ] {
        let analytic = scenario_dist(kind);
        let path = dir.path().join(format!("{kind}.csv"));
        materialize(&analytic, n, &path);
        let ingested = ingest_csv(&path, &cols, 0.0).unwrap().dist;
        let (a, b) = (audit(&analytic, &cfg).unwrap(), audit(&ingested, &cfg).unwrap());
        let ga = [a.gaps.sp_gap, a.gaps.eo_gap, a.gaps.pp_gap, a.gaps.dataset_mi, a.pid.uni_a, a.pid.uni_b, a.pid.red, a.pid.syn];
        let gb = [b.gaps.sp_gap, b.gaps.eo_gap, b.gaps.pp_gap, b.gaps.dataset_mi, b.pid.uni_a, b.pid.uni_b, b.pid.red, b.pid.syn];
        for (x, y) in ga.iter().zip(&gb) {
            assert!((x - y).abs() <= 1e-9, "{kind}: {ga:?} vs {gb:?}");
        }
    }
}

#[test]
fn dataset_only_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    // P(Y = Z) = 0.75 with uniform Z and Y.
    std::fs::write(&path, "sex,income\nF,0\nF,0\nF,0\nF,1\nM,1\nM,1\nM,1\nM,0\n").unwrap();
    let out = fairpid(&["audit", "--input", path.to_str().unwrap(), "--z-col", "sex", "--y-col", "income"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["meta"]["mode"], "dataset_only");
    assert!(v["gaps"]["sp"].is_null() && v["pid"].is_null() && v["theorems"].is_null());
    let h = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
    assert!((as_f64(&v["gaps"]["dataset_mi"]) - (1.0 - h)).abs() < 1e-6);
}

#[test]
fn nats_scale_every_measure() {
    let bits = json(&fairpid(&["scenario", "example2"]));
    let nats = json(&fairpid(&["scenario", "example2", "--units", "nats"]));
    assert_eq!(nats["meta"]["units"], "nats");
    let b = as_f64(&bits["pid"]["red"]);
    assert!((as_f64(&nats["pid"]["red"]) - b * std::f64::consts::LN_2).abs() < 2e-6);
}

#[test]
fn text_format_lists_measures() {
    let out = fairpid(&["scenario", "example3", "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["sp", "eo", "pp", "syn", "t1"] {
        assert!(text.contains(key), "{key} missing:\n{text}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = fairpid(&["scenario", "example1", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = std::fs::read(&path).unwrap();
    assert_eq!(written, fairpid(&["scenario", "example1"]).stdout);

    let bad = fairpid(&["sweep", "markov_sweep", "--out", "/nonexistent/dir/s.csv"]);
    assert_eq!(code(&bad), exit::IO);
}

#[test]
fn blackwell_subcommand() {
    let v = json(&fairpid(&["blackwell", "--scenario", "example4", "--candidate", "y"]));
    assert_eq!(v["feasible"], true, "{v}");
    assert_eq!(v["sufficient"], "Y");
    let v = json(&fairpid(&["blackwell", "--scenario", "example4", "--candidate", "yhat"]));
    assert_eq!(v["feasible"], false, "{v}");
}

fn sweep_table(args: &[&str]) -> (Vec<String>, Vec<Vec<f64>>) {
    let out = fairpid(args);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut r = csv::Reader::from_reader(out.stdout.as_slice());
    let header = r.headers().unwrap().iter().map(str::to_owned).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|s| s.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn markov_sweep_csv_keeps_tradeoff_constant() {
    let (header, rows) = sweep_table(&["sweep", "markov_sweep"]);
    let mut want = vec!["rho".to_owned(), "q".to_owned()];
    want.extend(SWEEP_COLUMNS.map(str::to_owned));
    assert_eq!(header, want);
    assert_eq!(rows.len(), 11);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (q, sp, pp, mi) = (col("q"), col("sp_gap"), col("pp_gap"), col("dataset_mi"));
    for w in rows.windows(2) {
        assert!(w[0][q] < w[1][q]);
        assert!(w[0][sp] <= w[1][sp] + 1e-12);
    }
    for r in &rows {
        assert!((r[sp] + r[pp] - r[mi]).abs() <= 1e-6, "{r:?}");
    }
    assert!(rows[0][sp].abs() < 1e-9);
    assert!((rows[10][sp] - 0.531).abs() < 1e-3);
}

#[test]
fn single_point_sweep_matches_audit() {
    let spec = ScenarioSpec::new(ScenarioKind::MarkovSweep)
        .with_param("q_min", 0.8)
        .with_param("q_max", 0.8)
        .with_param("points", 1.0);
    let cfg = SolverConfig::default();
    let rows = sweep_rows(&spec, &cfg).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].audit, audit(&rows[0].dist, &cfg).unwrap());
    let mut buf = Vec::new();
    run_sweep(&spec, &cfg, Units::Bits, &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 2);
}

#[test]
fn sp_zero_sweep_screens_theorem_three() {
    let (header, rows) = sweep_table(&["sweep", "sp_zero_family", "--seed", "3"]);
    assert_eq!(rows.len(), 50);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let (sp, eo, pp) = (col("sp_gap"), col("eo_gap"), col("pp_gap"));
    for r in &rows {
        assert!(r[sp] < 1e-8);
        assert!(r[pp] >= r[eo] - 1e-6, "{r:?}");
    }
}
