//! Full test battery on a trial CSV, printed as a table.
//!
//! cargo run --release --example analyze_trial -- [trial.csv]

use std::path::PathBuf;

use permancova::cli::{load_trial_csv, run_analysis, sha256_hex, IngestOptions};
use permancova::hypothesis_tests::Method;

fn main() -> permancova::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/trial.csv")));
    let opts = IngestOptions {
        stratum_column: "site".into(),
        treatment_column: "arm".into(),
        treatment_ref: Some("placebo".into()),
        ..IngestOptions::default()
    };
    let set = load_trial_csv(&path, &opts)?;
    let digest = sha256_hex(&std::fs::read(&path)?);
    let report = run_analysis(&set, &Method::ALL, 10_000, 2024, digest)?;

    let mut sites = set.strata.clone();
    sites.sort();
    sites.dedup();
    println!("{} units, {} strata, treated arm {}", set.subjects.len(), sites.len(), set.arms[1]);
    for row in &report.rows {
        let flags: Vec<String> = row.flags.iter().map(|f| format!("{f:?}")).collect();
        println!(
            "{:<16} {:<26} {:>9.4} p={:.4} {}",
            row.endpoint,
            row.method.name(),
            row.statistic,
            row.p_value,
            flags.join(",")
        );
    }
    for a in &report.arms {
        println!("{:<16} {:<14} n={} mean {:.3} sd {:.3}", a.endpoint, a.arm, a.n, a.mean, a.sd);
    }
    Ok(())
}
