//! Command-line front end: ingestion, analysis reports and power-study runs.

mod commands;
mod ingest;
mod report;

pub use commands::{
    exit_code, load_scenarios, power_rows, run, run_analyze_command, run_diagnose_command,
    run_simulation_command, Cli, Command, Format, InputArgs, PowerRow, EXIT_INPUT, EXIT_NUMERICAL,
    EXIT_OK,
};
pub use ingest::{load_trial_csv, read_trial_csv, write_trial_csv, IngestOptions, TrialSet};
pub use report::{
    baseline_outcome_correlation, method_seed, run_analysis, sha256_hex, summarize_by_arm,
    write_atomic, AnalysisReport, ArmSummary, CorrelationSummary, EndpointDiagnostics, Provenance,
    ReportRow, CHANGE_SCORE_THRESHOLD,
};
