// End-to-end audit of a CSV file of predictions.

use std::fs;

use fairpid::ingest::{ingest_csv, CsvColumns};
use fairpid::pid::SolverConfig;
use fairpid::report::{run_audit, Format, ReportOptions};

pub fn run_example() -> fairpid::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("predictions.csv");

    // 200 applicants: approvals track group membership, labels do not.
    let mut csv = String::from("group,approved,qualified\n");
    for (group, approved, qualified, n) in [("a", 1, 1, 45), ("a", 1, 0, 40), ("a", 0, 1, 5), ("a", 0, 0, 10)]
        .into_iter()
        .chain([("b", 1, 1, 10), ("b", 1, 0, 5), ("b", 0, 1, 40), ("b", 0, 0, 45)])
    {
        for _ in 0..n {
            csv.push_str(&format!("{group},{approved},{qualified}\n"));
        }
    }
    fs::write(&path, csv)?;

    let got = ingest_csv(&path, &CsvColumns::new("group", "qualified", Some("approved")), 0.0)?;
    let opts = ReportOptions {
        source: "predictions.csv".into(),
        records: Some(got.records),
        ..ReportOptions::default()
    };
    let report = run_audit(&got.dist, &SolverConfig::default(), &opts)?;
    print!("{}", report.render(Format::Text));
    println!("exit code would be {}", report.exit_code());
    Ok(())
}

fn main() -> fairpid::Result<()> {
    run_example()
}
