//! `permancova` subcommands.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::ingest::{load_trial_csv, IngestOptions};
use super::report::{run_analysis, sha256_hex, write_atomic, AnalysisReport};
use crate::error::{Error, Result};
use crate::hypothesis_tests::Method;
use crate::randomization::DEFAULT_DRAWS;
use crate::sim_engine::{power_ratio_table, run_power_study, PowerStudy, ScenarioConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "permancova", version, about = "Permutation tests and ANCOVA for stratified experiments")]
pub struct Cli {
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, clap::Args)]
pub struct InputArgs {
    /// Trial CSV: subject, stratum, treatment, baseline_<e>, outcome_<e>.
    #[arg(long)]
    pub input: PathBuf,
    /// Endpoints to analyze (comma separated); all by default.
    #[arg(long, value_delimiter = ',')]
    pub endpoints: Option<Vec<String>>,
    /// Treatment label coded as the reference arm (0).
    #[arg(long)]
    pub treatment_ref: Option<String>,
    #[arg(long, default_value = "subject")]
    pub subject_column: String,
    #[arg(long, default_value = "stratum")]
    pub stratum_column: String,
    #[arg(long, default_value = "treatment")]
    pub treatment_column: String,
    /// Monte-Carlo re-randomizations per test.
    #[arg(long, default_value_t = DEFAULT_DRAWS)]
    pub permutations: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

impl InputArgs {
    fn options(&self) -> IngestOptions {
        IngestOptions {
            subject_column: self.subject_column.clone(),
            stratum_column: self.stratum_column.clone(),
            treatment_column: self.treatment_column.clone(),
            endpoints: self.endpoints.clone(),
            treatment_ref: self.treatment_ref.clone(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the test battery on every endpoint of a trial file.
    Analyze {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated methods.
        #[arg(long, value_delimiter = ',', default_value = "ancova,stratified_diff_means,lm_permutation,freedman_lane")]
        methods: Vec<Method>,
    },
    /// Run power studies from scenario files.
    Simulate {
        #[arg(long = "scenario", num_args = 1..)]
        scenarios: Vec<PathBuf>,
        /// Output path stem; writes `<out>.csv` and `<out>.json`.
        #[arg(long, default_value = "power")]
        out: PathBuf,
        /// Overrides every scenario's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// At most 2,000 replications and 999 inner draws.
        #[arg(long)]
        fast: bool,
    },
    /// Exchangeability diagnostic, baseline-outcome correlations and arm summaries.
    Diagnose {
        #[command(flatten)]
        input: InputArgs,
    },
}

/// Exit code for an error: numerical failures are 3, everything else 2.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

fn emit(out: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, write),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)?;
            lock.flush()?;
            Ok(())
        }
    }
}

fn analyze(input: &InputArgs, methods: &[Method]) -> Result<AnalysisReport> {
    let bytes = std::fs::read(&input.input).map_err(|e| Error::Input {
        path: input.input.clone(),
        message: e.to_string(),
    })?;
    let set = load_trial_csv(&input.input, &input.options())?;
    run_analysis(&set, methods, input.permutations, input.seed, sha256_hex(&bytes))
}

/// `analyze`: writes the report as CSV or JSON.
pub fn run_analyze_command(input: &InputArgs, methods: &[Method]) -> Result<()> {
    let report = analyze(input, methods)?;
    emit(input.out.as_deref(), |w| match input.format {
        Format::Csv => report.write_csv(w),
        Format::Json => report.write_json(w),
    })
}

#[derive(Debug, Serialize)]
struct Diagnosis<'a> {
    provenance: &'a super::report::Provenance,
    arms: &'a [super::report::ArmSummary],
    diagnostics: &'a [super::report::EndpointDiagnostics],
}

/// `diagnose`: exchangeability, correlations and arm summaries only.
pub fn run_diagnose_command(input: &InputArgs) -> Result<()> {
    let report = analyze(input, &[Method::FreedmanLane])?;
    emit(input.out.as_deref(), |w| match input.format {
        Format::Json => {
            let d = Diagnosis {
                provenance: &report.provenance,
                arms: &report.arms,
                diagnostics: &report.diagnostics,
            };
            serde_json::to_writer_pretty(w, &d)?;
            Ok(())
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record(["endpoint", "quantity", "stratum", "value", "note"])?;
            for d in &report.diagnostics {
                let fmt = |v: Option<f64>| v.map_or("undefined".to_string(), |r| format!("{r}"));
                if let Some(x) = &d.exchangeability {
                    let note = if x.p() <= crate::hypothesis_tests::CONCERN_LEVEL {
                        "residuals may not be exchangeable; prefer the LM permutation test"
                    } else {
                        ""
                    };
                    c.write_record([&d.endpoint, "exchangeability_p", "", &format!("{}", x.p()), note])?;
                }
                let note = if d.correlation.change_scores_advisable {
                    "correlation >= 0.5: change scores reasonable"
                } else {
                    ""
                };
                c.write_record([&d.endpoint, "correlation", "pooled", &fmt(d.correlation.pooled), note])?;
                for (label, r) in &d.correlation.per_stratum {
                    c.write_record([&d.endpoint, "correlation", label, &fmt(*r), ""])?;
                }
            }
            for a in &report.arms {
                let note = if a.single_unit { "single unit" } else { "" };
                c.write_record([&a.endpoint, "mean", &a.arm, &format!("{}", a.mean), ""])?;
                c.write_record([&a.endpoint, "sd", &a.arm, &format!("{}", a.sd), note])?;
            }
            c.flush()?;
            Ok(())
        }
    })
}

/// One CSV row per (scenario, test).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRow {
    pub scenario: String,
    pub family: String,
    pub latent: String,
    pub error_dist: String,
    pub gamma: f64,
    pub test: String,
    pub alpha: f64,
    pub rate: f64,
    pub se: f64,
    pub replications: usize,
    pub inner_b: usize,
    pub ratio_to_ancova: Option<f64>,
    pub mean_sample_ate: f64,
}

fn variant_name<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|j| j.as_str().map(str::to_string))
        .unwrap_or_default()
}

pub fn power_rows(config: &ScenarioConfig, study: &PowerStudy) -> Vec<PowerRow> {
    let ratios = study
        .estimates
        .iter()
        .find(|e| e.method == Method::Ancova)
        .and_then(|a| power_ratio_table(&study.estimates, a).ok());
    study
        .estimates
        .iter()
        .enumerate()
        .map(|(k, e)| PowerRow {
            scenario: study.scenario.clone(),
            family: variant_name(&config.family),
            latent: variant_name(&config.latent),
            error_dist: variant_name(&config.error_dist),
            gamma: config.gamma,
            test: e.method.name().to_string(),
            alpha: study.alpha,
            rate: e.rate,
            se: e.se,
            replications: e.replications,
            inner_b: study.inner_b,
            ratio_to_ancova: ratios.as_ref().map(|r| r[k].1),
            mean_sample_ate: study.mean_sample_ate,
        })
        .collect()
}

#[derive(Debug, Serialize)]
struct SimulationSummary<'a> {
    engine_version: &'a str,
    scenarios: Vec<(&'a ScenarioConfig, &'a PowerStudy)>,
}

/// Loads every scenario first, so a malformed file aborts before any output.
pub fn load_scenarios(paths: &[PathBuf], seed: Option<u64>, fast: bool) -> Result<Vec<ScenarioConfig>> {
    paths
        .iter()
        .map(|p| {
            let mut c = ScenarioConfig::load(p)?;
            if let Some(s) = seed {
                c.master_seed = s;
            }
            Ok(if fast { c.fast() } else { c })
        })
        .collect()
}

/// `simulate`: runs every scenario and writes `<out>.csv` and `<out>.json`.
pub fn run_simulation_command(paths: &[PathBuf], out: &Path, seed: Option<u64>, fast: bool) -> Result<Vec<PowerRow>> {
    if paths.is_empty() {
        eprintln!("warning: no scenario files given; writing empty results");
    }
    let configs = load_scenarios(paths, seed, fast)?;
    let studies = configs
        .iter()
        .map(|c| {
            run_power_study(c).map_err(|e| Error::Scenario {
                id: c.id.clone(),
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<PowerRow> = configs
        .iter()
        .zip(&studies)
        .flat_map(|(c, s)| power_rows(c, s))
        .collect();
    let csv_path = out.with_extension("csv");
    let json_path = out.with_extension("json");
    write_atomic(&csv_path, |w| {
        let mut c = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        c.write_record([
            "scenario", "family", "latent", "error_dist", "gamma", "test", "alpha", "rate", "se",
            "replications", "inner_b", "ratio_to_ancova", "mean_sample_ate",
        ])?;
        for r in &rows {
            c.serialize(r)?;
        }
        c.flush()?;
        Ok(())
    })?;
    write_atomic(&json_path, |w| {
        let summary = SimulationSummary {
            engine_version: env!("CARGO_PKG_VERSION"),
            scenarios: configs.iter().zip(&studies).collect(),
        };
        serde_json::to_writer_pretty(w, &summary)?;
        Ok(())
    })?;
    Ok(rows)
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let n = workers
        .or_else(|| std::thread::available_parallelism().ok().map(|n| n.get()))
        .unwrap_or(1)
        .max(1);
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Error::InvalidData(format!("cannot start {n} worker threads: {e}")))
}

/// Executes a parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let pool = match thread_pool(cli.workers) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Analyze { input, methods } => run_analyze_command(input, methods),
        Command::Simulate {
            scenarios,
            out,
            seed,
            fast,
        } => run_simulation_command(scenarios, out, *seed, *fast).map(|_| ()),
        Command::Diagnose { input } => run_diagnose_command(input),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
